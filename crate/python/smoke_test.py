#!/usr/bin/env python3
"""Smoke test for the trisym_py extension module.

Builds the cdylib with the extension-module feature if it is not already
present, exposes it on sys.path under the importable name, and exercises the
main classes end to end.

Usage: python3 python/smoke_test.py [--skip-build]
"""

import json
import math
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build_module(skip_build: bool) -> str:
    target = os.path.join(ROOT, "target", "release", "libtrisym_py.so")
    if not skip_build or not os.path.exists(target):
        subprocess.run(
            [
                "cargo",
                "build",
                "--release",
                "-p",
                "trisym-py",
                "--features",
                "extension-module",
            ],
            cwd=ROOT,
            check=True,
        )
    if not os.path.exists(target):
        raise SystemExit(f"expected {target} after the build")
    stage = tempfile.mkdtemp(prefix="trisym_py_")
    shutil.copy(target, os.path.join(stage, "trisym_py.so"))
    return stage


def approx(a, b, tol=1e-9):
    assert abs(a - b) < tol, f"{a} vs {b}"


def main():
    skip_build = "--skip-build" in sys.argv
    sys.path.insert(0, build_module(skip_build))
    import trisym_py

    ids = trisym_py.catalog_ids()
    assert "sp:1" in ids and "dual:so2n:3" in ids, ids
    print(f"catalog: {len(ids)} entries")

    # Structure-constant algebra through JSON: sl(2, R).
    sl2 = trisym_py.LieAlgebra.from_json(
        json.dumps(
            {
                "dim": 3,
                "basis_names": ["H", "E", "F"],
                "brackets": [
                    [0, 1, [[1, 2.0]]],
                    [0, 2, [[2, -2.0]]],
                    [1, 2, [[0, 1.0]]],
                ],
            }
        )
    )
    assert sl2.jacobi_residual() < 1e-12
    assert sl2.killing_signature() == (2, 1, 0)
    assert sl2.radical_dim() == 0
    assert sl2.is_simple()
    print("sl(2, R): jacobi, Killing signature, radical, simplicity OK")

    # Admissibility of a catalog entry.
    rep = trisym_py.Representation.build("sp:1")
    assert rep.admissible() and rep.background_metric_ok()
    resid, lam = rep.casimir_identity()
    assert resid < 1e-12 and abs(lam - 1.0) < 1e-12
    print(f"sp:1 admissible, casimir residual {resid:.2e}")

    # The flat-bundle model over the hyperbolic plane: expanding soliton.
    model = trisym_py.Model.build("model:sp:1")
    assert model.dim == 5 and model.dim_v_block == 2 and model.type_iii
    assert model.nullity_dim() == 2
    is_sol, lam, sol_resid = model.soliton()
    assert is_sol and lam < 0
    approx(lam, -0.75)
    print(f"sp:1 background metric: expanding soliton, lambda = {lam:.4f}")

    n_resid, n_ker, n_img = model.nijenhuis()
    assert n_resid < 1e-12 and n_ker == 0 and n_img == 2
    print("nijenhuis structure OK")

    geo = json.loads(model.geometry())
    assert geo["report"]["almost_kahler"] and geo["polar"] and geo["irreducible"]
    print("geometry report: almost-Kaehler, polar, irreducible")

    # Isometry algebra dimension for the wedge model.
    wedge = trisym_py.Model.build("su1n:1:1")
    dim_i, steps, dim_gb, classification = wedge.isometry()
    assert dim_gb == 8 and classification == "holomorphic_isometries", (
        dim_i,
        steps,
        dim_gb,
        classification,
    )
    print(f"su1n:1:1 isometry: dim i = {dim_i}, dim g_b = {dim_gb}")

    # Deformed metrics: spectrum follows psi(lambda) = 2 lambda / (1 - lambda^2).
    lam = 0.4
    spectrum = wedge.ricci_spectrum(lambdas=[lam])
    top = max(spectrum)
    approx(top, 2 * lam / (1 - lam * lam) * 0.25, 1e-9)
    is_sol, _, resid = wedge.soliton(lambdas=[lam])
    assert not is_sol and resid > 1e-3
    print(f"deformed su1n:1:1: non-soliton (residual {resid:.2e}), spectrum OK")

    if not math.isfinite(sol_resid):
        raise SystemExit("unexpected non-finite residual")
    print("smoke test OK")


if __name__ == "__main__":
    main()

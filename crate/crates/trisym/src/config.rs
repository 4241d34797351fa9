use serde::{Deserialize, Serialize};

/// Residual and rank thresholds used across all checks.
///
/// Structure constants are O(1) after normalization, so absolute residual
/// thresholds are meaningful. Singular values below `rank_rel * sigma_max`
/// count as zero.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identity residuals (Jacobi, Bianchi, admissibility, ...).
    pub residual: f64,
    /// Relative singular-value cutoff for numerical rank decisions.
    pub rank_rel: f64,
    /// Maximum principal angle (radians) for subspace equality.
    pub angle: f64,
    /// Relative soliton residual below which a metric is declared a soliton.
    pub soliton_yes: f64,
    /// Relative soliton residual above which a metric is declared a non-soliton.
    /// Residuals in between are reported as inconclusive.
    pub soliton_no: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-9,
            rank_rel: 1e-8,
            angle: 1e-6,
            soliton_yes: 1e-7,
            soliton_no: 1e-3,
        }
    }
}

impl Tolerances {
    /// Default tolerances with the residual threshold overridden by the
    /// `TRISYM_TOL` environment variable when set.
    pub fn from_env() -> Self {
        let mut t = Tolerances::default();
        if let Ok(s) = std::env::var("TRISYM_TOL") {
            if let Ok(v) = s.parse::<f64>() {
                t.residual = v;
            }
        }
        t
    }
}

/// Rank bounds for catalog enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankBounds {
    pub sp_max_m: usize,
    pub su_max_pq: usize,
    pub su1n_max_n: usize,
    pub so_star_max_m: usize,
    pub so2n_max_n: usize,
}

impl Default for RankBounds {
    fn default() -> Self {
        RankBounds {
            sp_max_m: 3,
            su_max_pq: 5,
            su1n_max_n: 4,
            so_star_max_m: 3,
            so2n_max_n: 5,
        }
    }
}

/// CLI/config-file configuration: tolerances plus catalog rank bounds.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Config {
    #[serde(default)]
    pub tolerances: TolerancesOpt,
    #[serde(default)]
    pub ranks: RankBounds,
}

/// Optional overrides so a config file may set only some fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TolerancesOpt {
    pub residual: Option<f64>,
    pub rank_rel: Option<f64>,
    pub angle: Option<f64>,
    pub soliton_yes: Option<f64>,
    pub soliton_no: Option<f64>,
}

impl Config {
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::from_env();
        let o = &self.tolerances;
        if let Some(v) = o.residual {
            t.residual = v;
        }
        if let Some(v) = o.rank_rel {
            t.rank_rel = v;
        }
        if let Some(v) = o.angle {
            t.angle = v;
        }
        if let Some(v) = o.soliton_yes {
            t.soliton_yes = v;
        }
        if let Some(v) = o.soliton_no {
            t.soliton_no = v;
        }
        t
    }
}

use super::BaselineError;
use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

/// Two-way classical models whose size is bounded through a DFA simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Model {
    /// `n` states give a DFA with `(n+1)^(n+1)` states.
    #[serde(rename = "2DFA")]
    TwoDfa,
    /// `n` states give a DFA with `2^((n-1)²+n)` states.
    #[serde(rename = "2NFA")]
    TwoNfa,
    /// `n` states (polynomial expected time) give a DFA with `n^(b·n²)`
    /// states.
    #[serde(rename = "2PFA")]
    TwoPfa { b: u32 },
}

impl Model {
    pub fn label(&self) -> &'static str {
        match self {
            Model::TwoDfa => "2DFA",
            Model::TwoNfa => "2NFA",
            Model::TwoPfa { .. } => "2PFA",
        }
    }

    /// Size of the simulating DFA for an `n`-state machine.
    pub fn dfa_size(&self, n: u64) -> BigUint {
        match *self {
            Model::TwoDfa => Pow::pow(BigUint::from(n + 1), n + 1),
            Model::TwoNfa => BigUint::one() << ((n.max(1) - 1).pow(2) + n),
            Model::TwoPfa { b } => Pow::pow(BigUint::from(n), b as u64 * n * n),
        }
    }
}

/// Smallest `n` whose simulating DFA has at least `bound` states.
pub fn min_states(bound: &BigUint, model: Model) -> Result<u64, BaselineError> {
    if *bound < BigUint::from(2u32) {
        return Err(BaselineError::Parameter("DFA lower bound must be at least 2".into()));
    }
    if let Model::TwoPfa { b: 0 } = model {
        return Err(BaselineError::Parameter("b must be positive".into()));
    }
    let mut n = 1;
    while model.dfa_size(n) < *bound {
        n += 1;
    }
    Ok(n)
}

/// The closed-form floor stated for each family: `√log m` (2DFA, 2NFA)
/// and `∛((log m)/b)` (2PFA) for the promise `aᵐbᵐ`; `√m` and `∛(m/b)`
/// for `{xcx : |x| = m}`.
pub fn paper_floor(twin: bool, m: u64, model: Model) -> f64 {
    let x = if twin { m as f64 } else { (m as f64).log2() };
    match model {
        Model::TwoDfa | Model::TwoNfa => x.sqrt(),
        Model::TwoPfa { b } => (x / b as f64).cbrt(),
    }
}

/// One cell of a bound table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub family: &'static str,
    pub m: u64,
    /// DFA lower bound the calculation starts from.
    pub dfa_bound: String,
    pub model: Model,
    pub states: u64,
    pub floor: f64,
    /// Whether `states` is at least `floor`.
    pub meets_floor: bool,
    /// Whether `states` is strictly above `floor`.
    pub exceeds_floor: bool,
}

/// The calculator row for `(family, m, model)`. The DFA bound is `2m+2`
/// for the promise `aᵐbᵐ` and `2ᵐ` for `{xcx : |x| = m}`.
pub fn lower_bound(twin: bool, m: u64, model: Model) -> Result<BoundRow, BaselineError> {
    if m == 0 {
        return Err(BaselineError::Parameter("m must be at least 1".into()));
    }
    let bound = if twin { BigUint::one() << m } else { BigUint::from(2 * m + 2) };
    let states = min_states(&bound, model)?;
    let floor = paper_floor(twin, m, model);
    Ok(BoundRow {
        family: if twin { "twin-m" } else { "aeq" },
        m,
        dfa_bound: bound.to_string(),
        model,
        states,
        floor,
        meets_floor: states as f64 >= floor,
        exceeds_floor: states as f64 > floor,
    })
}

/// Rows for every model at each `m`.
pub fn lower_bound_table(twin: bool, ms: &[u64], b: u32) -> Result<Vec<BoundRow>, BaselineError> {
    let mut rows = Vec::new();
    for &m in ms {
        for model in [Model::TwoDfa, Model::TwoNfa, Model::TwoPfa { b }] {
            rows.push(lower_bound(twin, m, model)?);
        }
    }
    Ok(rows)
}

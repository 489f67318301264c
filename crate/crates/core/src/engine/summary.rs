use crate::numerics::Prob;
use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Round decomposition plus closed-form geometric sum.
    ClosedForm,
    /// Finite-horizon branch evolution.
    Truncated,
    /// Trajectory sampling.
    MonteCarlo,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::ClosedForm => "closed-form",
            Strategy::Truncated => "truncated",
            Strategy::MonteCarlo => "monte-carlo",
        })
    }
}

/// A sampled frequency (or mean) with a 99% confidence interval.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledValue {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub half_width: f64,
    pub samples: u64,
}

/// A probability mass or expectation: certified (exact or interval) or
/// sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass {
    Certified(Prob),
    Sampled(SampledValue),
}

impl Mass {
    pub fn to_f64(&self) -> f64 {
        match self {
            Mass::Certified(p) => p.to_f64(),
            Mass::Sampled(s) => s.value,
        }
    }

    pub fn certified(&self) -> Option<&Prob> {
        match self {
            Mass::Certified(p) => Some(p),
            Mass::Sampled(_) => None,
        }
    }

    pub fn sampled(&self) -> Option<&SampledValue> {
        match self {
            Mass::Certified(_) => None,
            Mass::Sampled(s) => Some(s),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Mass::Certified(p) => p.render(),
            Mass::Sampled(s) => format!("{:.6} ± {:.6}", s.value, s.half_width),
        }
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            Mass::Certified(p) => p.provenance(),
            Mass::Sampled(_) => "sampled",
        }
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Mass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Mass::Certified(p) => p.serialize(s),
            Mass::Sampled(v) => {
                let mut st = s.serialize_struct("Mass", 5)?;
                st.serialize_field("value", &format!("{}", v.value))?;
                st.serialize_field("float", &v.value)?;
                st.serialize_field("provenance", "sampled")?;
                st.serialize_field("ci", &[v.lo, v.hi])?;
                st.serialize_field("half_width", &v.half_width)?;
                st.end()
            }
        }
    }
}

/// Halting probabilities of a run. `accept + reject + residual = 1`
/// exactly for exact masses, by containment for intervals, and by
/// construction for sampled frequencies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaltingSummary {
    pub strategy: Strategy,
    pub accept: Mass,
    pub reject: Mass,
    pub residual: Mass,
    /// Expected number of steps, conditioned on halting.
    pub expected_steps: Option<Mass>,
    /// Expected number of rounds (closed form only).
    pub expected_rounds: Option<Mass>,
    /// Steps (truncated), trials (sampled) or rounds analysed.
    pub horizon: u64,
}

impl HaltingSummary {
    pub fn accept_f64(&self) -> f64 {
        self.accept.to_f64()
    }

    pub fn reject_f64(&self) -> f64 {
        self.reject.to_f64()
    }

    /// The certified accept mass; panics on sampled summaries.
    pub fn accept_prob(&self) -> &Prob {
        self.accept.certified().expect("certified summary")
    }

    /// The certified reject mass; panics on sampled summaries.
    pub fn reject_prob(&self) -> &Prob {
        self.reject.certified().expect("certified summary")
    }

    pub fn residual_prob(&self) -> &Prob {
        self.residual.certified().expect("certified summary")
    }

    /// Checks `accept + reject + residual ∋ 1` for certified summaries.
    pub fn conserves_mass(&self) -> bool {
        match (&self.accept, &self.reject, &self.residual) {
            (Mass::Certified(a), Mass::Certified(r), Mass::Certified(x)) => {
                a.add(r).add(x).contains(&num_traits::One::one())
            }
            (Mass::Sampled(a), Mass::Sampled(r), Mass::Sampled(x)) => {
                (a.value + r.value + x.value - 1.0).abs() < 1e-9
            }
            _ => false,
        }
    }
}

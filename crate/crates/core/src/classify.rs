//! Vanishing criteria for the `p`-part of `H^2_et(o_L', Z_p(i))` over
//! `p`-extensions `L` of Q, and enumeration of the admissible tame sets.
//!
//! Every decider is a congruence or character condition on the tame primes;
//! the only global input is the base order from [`crate::ktable`].

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum;
use crate::ktable;
use crate::kummer;
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealType {
    TotallyReal,
    TotallyImaginary,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExtensionShape {
    pub p: u64,
    pub ramified_tame: BTreeSet<u64>,
    pub wild: bool,
    pub real_type: RealType,
    pub cyclic: bool,
}

impl ExtensionShape {
    pub fn new(
        p: u64,
        ramified_tame: impl IntoIterator<Item = u64>,
        wild: bool,
        real_type: RealType,
        cyclic: bool,
    ) -> Result<Self> {
        let template = ShapeTemplate::new(p, wild, real_type, cyclic)?;
        template.with_tame(ramified_tame)
    }
}

/// An [`ExtensionShape`] without its tame set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ShapeTemplate {
    pub p: u64,
    pub wild: bool,
    pub real_type: RealType,
    pub cyclic: bool,
}

impl ShapeTemplate {
    pub fn new(p: u64, wild: bool, real_type: RealType, cyclic: bool) -> Result<Self> {
        exactnum::require_prime(p)?;
        if (p == 2) == (real_type == RealType::NotApplicable) {
            return Err(Error::InvalidExtension(format!(
                "real type {real_type:?} does not fit p = {p}"
            )));
        }
        Ok(ShapeTemplate {
            p,
            wild,
            real_type,
            cyclic,
        })
    }

    pub fn with_tame(&self, tame: impl IntoIterator<Item = u64>) -> Result<ExtensionShape> {
        let ramified_tame: BTreeSet<u64> = tame.into_iter().collect();
        for &ell in &ramified_tame {
            exactnum::require_prime(ell)?;
            if ell == self.p {
                return Err(Error::InvalidExtension(format!(
                    "{ell} is the degree prime and cannot be tamely ramified"
                )));
            }
            if self.p != 2 && ell % self.p != 1 {
                return Err(Error::NotOneModP { ell, p: self.p });
            }
        }
        Ok(ExtensionShape {
            p: self.p,
            ramified_tame,
            wild: self.wild,
            real_type: self.real_type,
            cyclic: self.cyclic,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Vanishes,
    Nonzero,
    Conditional,
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    #[serde(rename = "vandiver")]
    Vandiver,
    #[serde(rename = "H_i")]
    Hi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub condition: Option<Condition>,
    pub reason: String,
    pub k_theory_consequence: Option<String>,
}

impl Decision {
    fn new(verdict: Verdict, reason: impl Into<String>) -> Self {
        Decision {
            verdict,
            condition: None,
            reason: reason.into(),
            k_theory_consequence: None,
        }
    }

    fn vanishes_if(holds: bool, reason: impl Into<String>) -> Self {
        let verdict = if holds { Verdict::Vanishes } else { Verdict::Nonzero };
        Decision::new(verdict, reason)
    }

    /// A `vanishes` verdict that only holds under `condition` becomes
    /// `conditional`; other verdicts just record the condition.
    fn assuming(mut self, condition: Condition, assumed: bool) -> Self {
        if self.verdict == Verdict::Vanishes && !assumed {
            self.verdict = Verdict::Conditional;
        }
        self.condition = Some(condition);
        self
    }

    /// Whether the decision admits the tame set (vanishing, possibly
    /// conditionally).
    pub fn admits(&self) -> bool {
        matches!(self.verdict, Verdict::Vanishes | Verdict::Conditional)
    }
}

fn single_prime(shape: &ExtensionShape) -> Option<Option<u64>> {
    match shape.ramified_tame.len() {
        0 => Some(None),
        1 => shape.ramified_tame.iter().next().map(|&l| Some(l)),
        _ => None,
    }
}

fn pm3_mod_8(ell: u64) -> bool {
    matches!(ell % 8, 3 | 5)
}

fn is_trivial(shape: &ExtensionShape) -> bool {
    shape.ramified_tame.is_empty() && !shape.wild
}

/// Whether the `p`-part of `H^2_et(o_L', Z_p(i))` vanishes.
pub fn vanishing_decision(shape: &ExtensionShape, i: u64, assume_vandiver: bool) -> Result<Decision> {
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    if is_trivial(shape) {
        return Ok(Decision::new(
            Verdict::Unsupported,
            "no ramified place: the shape describes the trivial extension",
        ));
    }
    let mut decision = if shape.p == 2 {
        decide_two(shape, i)
    } else {
        decide_odd(shape, i, assume_vandiver)?
    };
    decision.k_theory_consequence = Some(k_theory_consequence(shape, i, &decision));
    Ok(decision)
}

fn decide_odd(shape: &ExtensionShape, i: u64, assume_vandiver: bool) -> Result<Decision> {
    let p = shape.p;
    let at_most_one = single_prime(shape);
    if i % (p - 1) == 0 {
        return Ok(match at_most_one {
            None => Decision::new(Verdict::Nonzero, "more than one tame prime"),
            Some(None) => Decision::new(Verdict::Vanishes, "no tame prime"),
            Some(Some(ell)) => Decision::vanishes_if(
                ell % (p * p) != 1,
                format!("{ell} = {} (mod {})", ell % (p * p), p * p),
            ),
        });
    }
    if i % 2 == 0 {
        if !shape.ramified_tame.is_empty() {
            return Ok(Decision::new(
                Verdict::Nonzero,
                "tame ramification: not inside the cyclotomic Z_p-extension",
            ));
        }
        return Ok(match ktable::h2_divisible_by(i, p, assume_vandiver)? {
            Some(true) => Decision::new(Verdict::Nonzero, format!("{p} divides |H^2_M(Z, Z({i}))|")),
            Some(false) => Decision::new(Verdict::Vanishes, "inside the cyclotomic Z_p-extension"),
            None => Decision::new(Verdict::Vanishes, "inside the cyclotomic Z_p-extension")
                .assuming(Condition::Vandiver, false),
        });
    }
    let rad = kummer::radical(p, i, false)?;
    let decision = match at_most_one {
        None => Decision::new(Verdict::Nonzero, "more than one tame prime"),
        Some(None) => Decision::new(Verdict::Vanishes, "no tame prime"),
        Some(Some(ell)) => {
            let v = kummer::frobenius_vector(&rad, ell)?;
            Decision::vanishes_if(
                !v.is_zero(),
                format!("Frobenius component at {ell} is {:?}", v.components),
            )
        }
    };
    Ok(if rad.conditional_on_vandiver {
        decision.assuming(Condition::Vandiver, assume_vandiver)
    } else {
        decision
    })
}

fn decide_two(shape: &ExtensionShape, i: u64) -> Decision {
    match shape.real_type {
        RealType::TotallyImaginary => imaginary_criterion(shape),
        RealType::TotallyReal if i % 2 == 0 => Decision::new(
            Verdict::Nonzero,
            "even twist over a totally real field: the real places contribute",
        ),
        RealType::TotallyReal => {
            let tame: Vec<u64> = shape.ramified_tame.iter().copied().collect();
            let holds = tame.len() <= 2
                && tame.iter().all(|&l| l % 8 != 1)
                && (tame.len() < 2 || tame[0] % 8 != tame[1] % 8);
            let reason = format!(
                "tame residues mod 8: {:?}",
                tame.iter().map(|l| l % 8).collect::<Vec<_>>()
            );
            let decision = Decision::vanishes_if(holds, reason);
            if shape.cyclic {
                decision
            } else {
                decision.assuming(Condition::Hi, false)
            }
        }
        RealType::NotApplicable => Decision::new(Verdict::Unsupported, "p = 2 needs a real type"),
    }
}

fn imaginary_criterion(shape: &ExtensionShape) -> Decision {
    match single_prime(shape) {
        None => Decision::new(Verdict::Nonzero, "more than one tame prime"),
        Some(None) => Decision::new(Verdict::Vanishes, "ramified only at 2 and infinity"),
        Some(Some(ell)) => Decision::vanishes_if(pm3_mod_8(ell), format!("{ell} = {} (mod 8)", ell % 8)),
    }
}

/// Vanishing of the positive cohomology `H^2_+`: unramified outside
/// `{2, infinity, ell}` with `ell = +-3 (mod 8)`.
pub fn positive_vanishing_decision(shape: &ExtensionShape, i: u64) -> Result<Decision> {
    if shape.p != 2 {
        return Err(Error::Unsupported(format!(
            "positive cohomology criterion needs p = 2, got {}",
            shape.p
        )));
    }
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    Ok(imaginary_criterion(shape))
}

fn k_theory_consequence(shape: &ExtensionShape, i: u64, d: &Decision) -> String {
    let k = 2 * i - 2;
    let p = shape.p;
    if p != 2 {
        return match d.verdict {
            Verdict::Vanishes => format!("K_{k}(o_L) has trivial {p}-part"),
            Verdict::Nonzero => format!("K_{k}(o_L) has nontrivial {p}-part"),
            _ => format!("K_{k}(o_L) has trivial {p}-part exactly when the verdict resolves to vanishes"),
        };
    }
    let positive = imaginary_criterion(shape).verdict == Verdict::Vanishes;
    match k % 8 {
        2 if positive => format!("K_{k}(o_L) (x) Z_2 is (Z/2)^r1, r1 the number of real places"),
        2 => format!("K_{k}(o_L) (x) Z_2 is strictly larger than (Z/2)^r1"),
        4 | 6 if positive => format!("K_{k}(o_L) (x) Z_2 = 0"),
        4 | 6 => format!("K_{k}(o_L) (x) Z_2 != 0"),
        _ => match d.verdict {
            Verdict::Vanishes => format!("K_{k}(o_L) (x) Z_2 = 0"),
            Verdict::Nonzero => format!("K_{k}(o_L) (x) Z_2 != 0"),
            _ => format!("K_{k}(o_L) (x) Z_2 = 0 exactly when the verdict resolves to vanishes"),
        },
    }
}

/// One admissible tame set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissible {
    pub tame: BTreeSet<u64>,
    pub decision: Decision,
}

fn candidate_primes(p: u64, bound: u64) -> Vec<u64> {
    (3..=bound)
        .filter(|&l| l != p && exactnum::is_prime(l) && (p == 2 || l % p == 1))
        .collect()
}

/// Visits the tame sets whose smallest prime is `candidates[k]`, growing in
/// ascending order and cutting at sets that are not admitted. Sound because
/// admissibility is inherited by subsets.
fn visit(
    template: &ShapeTemplate,
    i: u64,
    assume_vandiver: bool,
    candidates: &[u64],
    k: usize,
    current: &mut Vec<u64>,
    out: &mut Vec<Admissible>,
) -> Result<()> {
    current.push(candidates[k]);
    let shape = template.with_tame(current.iter().copied())?;
    let decision = vanishing_decision(&shape, i, assume_vandiver)?;
    if decision.admits() {
        out.push(Admissible {
            tame: shape.ramified_tame,
            decision,
        });
        for j in k + 1..candidates.len() {
            visit(template, i, assume_vandiver, candidates, j, current, out)?;
        }
    }
    current.pop();
    Ok(())
}

/// All tame sets of primes `<= bound` admitted by [`vanishing_decision`],
/// ordered by size, then lexicographically.
pub fn enumerate_vanishing(
    template: &ShapeTemplate,
    i: u64,
    bound: u64,
    assume_vandiver: bool,
    exec: Execution,
) -> Result<Vec<Admissible>> {
    if bound < 2 {
        return Err(Error::Unsupported(format!("enumeration bound {bound} < 2")));
    }
    let mut out = Vec::new();
    let empty = vanishing_decision(&template.with_tame([])?, i, assume_vandiver)?;
    if empty.admits() {
        out.push(Admissible {
            tame: BTreeSet::new(),
            decision: empty,
        });
    }
    let candidates = candidate_primes(template.p, bound);
    let starts: Vec<usize> = (0..candidates.len()).collect();
    let branches = exec.map(&starts, |&k| {
        let mut branch = Vec::new();
        visit(template, i, assume_vandiver, &candidates, k, &mut Vec::new(), &mut branch)?;
        Ok(branch)
    });
    for branch in branches {
        out.extend(branch?);
    }
    out.sort_by(|a, b| {
        a.tame
            .len()
            .cmp(&b.tame.len())
            .then_with(|| a.tame.iter().cmp(b.tame.iter()))
    });
    Ok(out)
}

//! The deterministic pair `(ν1, ν2)` built from uniform refinement (P1) and
//! Cantor halving (P2) on blocks of two binary generations.
//!
//! A quad-step refines every cell of generation `2k` into its four children of
//! generation `2k + 2`. Under P1 each child receives a quarter of the mass;
//! under P2 only the children `00` and `11` do, with half the mass each. All
//! nonzero cells of a measure therefore share one mass and the whole pair is
//! described by exact integer log2 profiles.

use serde::{Deserialize, Serialize};

use crate::dyadic::Word;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    P1,
    P2,
}

impl Scheme {
    /// log2 of the count multiplier per quad-step (mass shrinks by the same).
    fn rate(self) -> i128 {
        match self {
            Scheme::P1 => 2,
            Scheme::P2 => 1,
        }
    }

    /// log2 masses of the children `00, 01, 10, 11`.
    pub fn child_log2_masses(self) -> [f64; 4] {
        match self {
            Scheme::P1 => [-2.0; 4],
            Scheme::P2 => [-1.0, f64::NEG_INFINITY, f64::NEG_INFINITY, -1.0],
        }
    }
}

/// Generation landmarks of stage `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub n: u32,
    pub eps: f64,
    /// `[j¹_n, j²_n, j³_n, j⁴_n]`, counted in quad-steps.
    pub j: [u128; 4],
}

/// Quad-steps `start+1..=end` use `schemes` for `(ν1, ν2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub stage: u32,
    pub step: u8,
    pub start: u128,
    pub end: u128,
    pub schemes: (Scheme, Scheme),
}

/// Exact log2 profile at binary generation `generation` (always even).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub generation: u128,
    pub log2_m1: i128,
    pub log2_m2: i128,
    pub log2_c1: i128,
    pub log2_c2: i128,
    pub log2_c12: i128,
}

impl Profile {
    fn origin() -> Self {
        Self { generation: 0, log2_m1: 0, log2_m2: 0, log2_c1: 0, log2_c2: 0, log2_c12: 0 }
    }

    fn advance(&self, schemes: (Scheme, Scheme), steps: u128) -> Self {
        let s = steps as i128;
        let (r1, r2) = (schemes.0.rate(), schemes.1.rate());
        Self {
            generation: self.generation + 2 * steps,
            log2_m1: self.log2_m1 - r1 * s,
            log2_m2: self.log2_m2 - r2 * s,
            log2_c1: self.log2_c1 + r1 * s,
            log2_c2: self.log2_c2 + r2 * s,
            log2_c12: self.log2_c12 + r1.min(r2) * s,
        }
    }

    /// `-(1/j)(log2 c12 + q1 log2 m1 + q2 log2 m2)`.
    pub fn tau(&self, q1: f64, q2: f64) -> f64 {
        let j = self.generation as f64;
        -(self.log2_c12 as f64 + q1 * self.log2_m1 as f64 + q2 * self.log2_m2 as f64) / j
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSchedule {
    pub n_max: u32,
    pub stages: Vec<Stage>,
    pub segments: Vec<Segment>,
    /// Profiles at generation 0 and at the end of every segment.
    pub milestones: Vec<Profile>,
}

/// `ε_n = 2^{-(n+2)}`.
pub fn eps(n: u32) -> f64 {
    2f64.powi(-(n as i32 + 2))
}

const STEP_SCHEMES: [(Scheme, Scheme); 4] =
    [(Scheme::P1, Scheme::P2), (Scheme::P1, Scheme::P1), (Scheme::P2, Scheme::P1), (Scheme::P1, Scheme::P1)];

pub fn build_counterexample_schedule(n_max: u32) -> Result<CounterexampleSchedule> {
    if n_max == 0 {
        return Err(Error::Parameter("n_max must be at least 1".into()));
    }
    let mut stages = Vec::new();
    let mut segments = Vec::new();
    let mut milestones = vec![Profile::origin()];
    let mut prev_j4: u128 = 0;
    for n in 1..=n_max {
        // 2/ε_n = 2^{n+3}; every rule reads `5 j_prev (+1) ≤ j ε_n / 2`, so the
        // smallest admissible j is the product below, exactly.
        let scale: u128 = 1u128.checked_shl(n + 3).ok_or(Error::Overflow(n))?;
        let mut j = [0u128; 4];
        let mut prev = prev_j4;
        for (i, slot) in j.iter_mut().enumerate() {
            let base = prev.checked_mul(5).and_then(|v| v.checked_add((i == 0) as u128));
            *slot = base.and_then(|b| b.checked_mul(scale)).ok_or(Error::Overflow(n))?;
            prev = *slot;
        }
        // The profile stores 2j and log2 counts up to 4j in i128.
        if j[3] > (i128::MAX as u128) / 4 {
            return Err(Error::Overflow(n));
        }
        let mut start = prev_j4;
        for (step, &end) in j.iter().enumerate() {
            let seg = Segment { stage: n, step: step as u8 + 1, start, end, schemes: STEP_SCHEMES[step] };
            let last = *milestones.last().expect("origin");
            milestones.push(last.advance(seg.schemes, end - start));
            segments.push(seg);
            start = end;
        }
        stages.push(Stage { n, eps: eps(n), j });
        prev_j4 = j[3];
    }
    Ok(CounterexampleSchedule { n_max, stages, segments, milestones })
}

impl CounterexampleSchedule {
    /// Deepest binary generation covered.
    pub fn max_generation(&self) -> u128 {
        self.milestones.last().map_or(0, |p| p.generation)
    }

    fn segment_index(&self, k: u128) -> Option<usize> {
        // Segments are contiguous and sorted; quad-step k lives in start < k ≤ end.
        let idx = self.segments.partition_point(|s| s.end < k);
        (idx < self.segments.len()).then_some(idx)
    }

    /// Profile at binary generation `generation`.
    pub fn profile_at(&self, generation: u128) -> Result<Profile> {
        if generation % 2 == 1 {
            return Err(Error::OddGeneration(generation));
        }
        if generation > self.max_generation() {
            return Err(Error::Depth {
                requested: generation.min(u64::MAX as u128) as u64,
                available: self.max_generation().min(u64::MAX as u128) as u64,
            });
        }
        let k = generation / 2;
        if k == 0 {
            return Ok(Profile::origin());
        }
        let i = self.segment_index(k).expect("k within the schedule");
        let seg = self.segments[i];
        Ok(self.milestones[i].advance(seg.schemes, k - seg.start))
    }

    /// Schemes applied at quad-step `k ≥ 1` (refining generation `2k-2`).
    pub fn schemes_at(&self, k: u128) -> Result<(Scheme, Scheme)> {
        let i = self
            .segment_index(k)
            .filter(|_| k >= 1)
            .ok_or(Error::Depth { requested: (2 * k).min(u64::MAX as u128) as u64, available: 0 })?;
        Ok(self.segments[i].schemes)
    }

    /// Binary generation `2 j^i_n` for `i ∈ 1..=4`.
    pub fn milestone_generation(&self, n: u32, i: usize) -> u128 {
        2 * self.stages[n as usize - 1].j[i - 1]
    }
}

/// `τ_{ν1,ν2,j}(q1, q2)` at an even binary generation `j ≥ 2`.
pub fn counterexample_tau(schedule: &CounterexampleSchedule, j: u128, q1: f64, q2: f64) -> Result<f64> {
    if j == 0 {
        return Err(Error::Parameter("generation must be positive".into()));
    }
    Ok(schedule.profile_at(j)?.tau(q1, q2))
}

/// One of the two measures of the pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleMember {
    pub schedule: std::sync::Arc<CounterexampleSchedule>,
    /// 1 or 2.
    pub index: u8,
}

impl CounterexampleMember {
    pub fn new(schedule: std::sync::Arc<CounterexampleSchedule>, index: u8) -> Result<Self> {
        if index != 1 && index != 2 {
            return Err(Error::Parameter(format!("member index {index} is not 1 or 2")));
        }
        Ok(Self { schedule, index })
    }

    pub fn scheme_at(&self, k: u128) -> Result<Scheme> {
        let s = self.schedule.schemes_at(k)?;
        Ok(if self.index == 1 { s.0 } else { s.1 })
    }

    /// log2 mass of `I_w`; `w` must have even length.
    pub fn log_mass(&self, w: &Word) -> Result<f64> {
        if w.len() % 2 == 1 {
            return Err(Error::OddGeneration(w.len() as u128));
        }
        let mut acc = 0.0;
        for (t, pair) in w.bits().chunks(2).enumerate() {
            let child = (pair[0] * 2 + pair[1]) as usize;
            acc += self.scheme_at(t as u128 + 1)?.child_log2_masses()[child];
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_stage_landmarks() {
        let s = build_counterexample_schedule(1).unwrap();
        assert_eq!(s.stages[0].j[0], 16);
        assert_eq!(s.stages[0].j[1], 1280);
        assert_eq!(s.stages[0].eps, 0.125);
        let p = s.profile_at(32).unwrap();
        assert_eq!((p.log2_m1, p.log2_m2, p.log2_c12), (-32, -16, 16));
    }

    #[test]
    fn rules_give_smallest_admissible_generation() {
        let s = build_counterexample_schedule(3).unwrap();
        let mut prev = 0u128;
        for st in &s.stages {
            // ε_n / 2 = 2^{-(n+3)}, so the condition num / j ≤ ε_n / 2 reads num·2^{n+3} ≤ j.
            let shift = st.n + 3;
            for (i, &j) in st.j.iter().enumerate() {
                let num = 5 * prev + (i == 0) as u128;
                assert!(num << shift <= j);
                assert!(num << shift > j - 1);
                prev = j;
            }
        }
    }

    #[test]
    fn profile_invariants_hold_everywhere_sampled() {
        let s = build_counterexample_schedule(4).unwrap();
        for seg in &s.segments {
            for k in [seg.start + 1, (seg.start + seg.end) / 2, seg.end] {
                let p = s.profile_at(2 * k).unwrap();
                assert_eq!(p.log2_m1 + p.log2_c1, 0);
                assert_eq!(p.log2_m2 + p.log2_c2, 0);
                assert!(p.log2_c12 <= p.log2_c1.min(p.log2_c2));
                assert!(p.log2_c1 as u128 <= p.generation && p.log2_c2 as u128 <= p.generation);
            }
        }
        assert!(build_counterexample_schedule(5).is_err());
    }

    #[test]
    fn odd_and_out_of_range_generations_are_rejected() {
        let s = build_counterexample_schedule(1).unwrap();
        assert!(matches!(counterexample_tau(&s, 33, 0.0, 0.0), Err(Error::OddGeneration(33))));
        assert!(counterexample_tau(&s, s.max_generation() + 2, 0.0, 0.0).is_err());
        let t = counterexample_tau(&s, 32, 0.0, 0.0).unwrap();
        assert!((t + 0.5).abs() < 1e-15);
    }

    #[test]
    fn cardinality_window_at_stage_ends() {
        let s = build_counterexample_schedule(3).unwrap();
        for st in &s.stages {
            let g = 2 * st.j[3];
            let c12 = s.profile_at(g).unwrap().log2_c12 as f64;
            let gf = g as f64;
            assert!(gf * (1.0 - 2.0 * st.eps) <= c12 && c12 <= gf * (1.0 + 2.0 * st.eps));
        }
    }

    #[test]
    fn word_masses_follow_the_schemes() {
        let s = std::sync::Arc::new(build_counterexample_schedule(1).unwrap());
        let nu1 = CounterexampleMember::new(s.clone(), 1).unwrap();
        let nu2 = CounterexampleMember::new(s, 2).unwrap();
        let w: Word = "0011".parse().unwrap();
        assert_eq!(nu1.log_mass(&w).unwrap(), -4.0);
        assert_eq!(nu2.log_mass(&w).unwrap(), -2.0);
        let w: Word = "0110".parse().unwrap();
        assert_eq!(nu2.log_mass(&w).unwrap(), f64::NEG_INFINITY);
        assert!(nu1.log_mass(&"011".parse().unwrap()).is_err());
    }
}

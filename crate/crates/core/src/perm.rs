//! Finite windows of permutations of the integers and the inversion-count
//! codecs between permutations and their right/left inversion counts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::QParam;

/// Closed integer interval `[lo..hi]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[-w..w]`.
    pub fn symmetric(w: u64) -> Self {
        Self {
            lo: -(w as i64),
            hi: w as i64,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// The values `sigma(lo), ..., sigma(hi)` of a permutation of the integers
/// on a finite window of positions. Values are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct PermWindow {
    lo: i64,
    hi: i64,
    values: Vec<i64>,
}

#[derive(Deserialize)]
struct RawWindow {
    lo: i64,
    hi: i64,
    values: Vec<i64>,
}

impl TryFrom<RawWindow> for PermWindow {
    type Error = Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        let interval = Interval::new(raw.lo, raw.hi)?;
        PermWindow::on(interval, raw.values)
    }
}

impl PermWindow {
    /// Window starting at position `lo`.
    pub fn new(lo: i64, values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInterval { lo, hi: lo - 1 });
        }
        let hi = lo + values.len() as i64 - 1;
        Self::on(Interval { lo, hi }, values)
    }

    pub fn on(interval: Interval, values: Vec<i64>) -> Result<Self> {
        if values.len() != interval.len() {
            return Err(Error::LengthMismatch {
                lo: interval.lo,
                hi: interval.hi,
                expected: interval.len(),
                got: values.len(),
            });
        }
        let mut sorted = values.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateValue(w[0]));
        }
        Ok(Self {
            lo: interval.lo,
            hi: interval.hi,
            values,
        })
    }

    /// One-line word on positions `1..=n`.
    pub fn from_word(word: Vec<i64>) -> Result<Self> {
        Self::new(1, word)
    }

    pub fn identity(interval: Interval) -> Self {
        Self {
            lo: interval.lo,
            hi: interval.hi,
            values: interval.iter().collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(lo: i64, values: Vec<i64>) -> Self {
        let hi = lo + values.len() as i64 - 1;
        Self { lo, hi, values }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sigma(i)` if `i` lies in the window.
    pub fn value_at(&self, i: i64) -> Option<i64> {
        if self.interval().contains(i) {
            Some(self.values[(i - self.lo) as usize])
        } else {
            None
        }
    }

    /// Displacement `sigma(i) - i`.
    pub fn displacement(&self, i: i64) -> Option<i64> {
        self.value_at(i).map(|v| v - i)
    }

    /// Position holding value `v`, if it lies in the window.
    pub fn position_of(&self, v: i64) -> Option<i64> {
        self.values
            .iter()
            .position(|&x| x == v)
            .map(|k| self.lo + k as i64)
    }

    /// True when the window's values are exactly its positions.
    pub fn is_self_contained(&self) -> bool {
        self.values.iter().all(|&v| self.lo <= v && v <= self.hi)
    }

    pub fn restrict(&self, sub: Interval) -> Result<PermWindow> {
        self.check_inside(sub)?;
        let a = (sub.lo - self.lo) as usize;
        let b = (sub.hi - self.lo) as usize;
        Ok(Self::from_parts_unchecked(
            sub.lo,
            self.values[a..=b].to_vec(),
        ))
    }

    /// Number of inversions among the window's entries.
    pub fn inversions(&self) -> u64 {
        count_inversions(&self.values)
    }

    fn check_inside(&self, sub: Interval) -> Result<()> {
        if !self.interval().contains_interval(&sub) {
            return Err(Error::OutsideWindow {
                a: sub.lo,
                b: sub.hi,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }
}

/// Number of pairs `i < j` with `word[i] > word[j]`.
pub fn count_inversions<T: Ord>(word: &[T]) -> u64 {
    let mut total = 0;
    for (i, a) in word.iter().enumerate() {
        total += word[i + 1..].iter().filter(|b| *b < a).count() as u64;
    }
    total
}

/// Right counts `r`, left counts `ell` and the certification state of each
/// left count over a window of positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionCounts {
    lo: i64,
    hi: i64,
    r: Vec<u64>,
    ell: Vec<u64>,
    #[serde(rename = "certified")]
    ell_certified: Vec<bool>,
    #[serde(rename = "residual", with = "decimal_string")]
    residual_bound: f64,
}

mod decimal_string {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        let value: f64 = text.parse().map_err(D::Error::custom)?;
        if !(value >= 0.0) {
            return Err(D::Error::custom("residual must be a nonnegative number"));
        }
        Ok(value)
    }
}

impl InversionCounts {
    pub fn new(
        lo: i64,
        r: Vec<u64>,
        ell: Vec<u64>,
        ell_certified: Vec<bool>,
        residual_bound: f64,
    ) -> Result<Self> {
        let n = r.len();
        if n == 0 {
            return Err(Error::InvalidInterval { lo, hi: lo - 1 });
        }
        let hi = lo + n as i64 - 1;
        for len in [ell.len(), ell_certified.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    lo,
                    hi,
                    expected: n,
                    got: len,
                });
            }
        }
        if !(residual_bound >= 0.0) {
            return Err(Error::InvalidTolerance {
                name: "residual_bound",
                value: residual_bound,
            });
        }
        Ok(Self {
            lo,
            hi,
            r,
            ell,
            ell_certified,
            residual_bound,
        })
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn r(&self) -> &[u64] {
        &self.r
    }

    pub fn ell(&self) -> &[u64] {
        &self.ell
    }

    pub fn ell_certified(&self) -> &[bool] {
        &self.ell_certified
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn all_certified(&self) -> bool {
        self.ell_certified.iter().all(|&c| c)
    }
}

/// Window-relative inversion counts. Exact for self-contained windows.
pub fn inversion_counts_window(w: &PermWindow) -> InversionCounts {
    let v = w.values();
    let n = v.len();
    let mut r = vec![0u64; n];
    let mut ell = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if v[j] < v[i] {
                r[i] += 1;
                ell[j] += 1;
            }
        }
    }
    InversionCounts {
        lo: w.lo,
        hi: w.hi,
        r,
        ell,
        ell_certified: vec![true; n],
        residual_bound: 0.0,
    }
}

/// Inverse of the right-count encoding on `{1..n}`: step `i` takes the
/// `(r_i + 1)`-th smallest value not yet used.
pub fn eliminate_right(r: &[u64]) -> Result<PermWindow> {
    let n = r.len();
    let mut remaining: Vec<i64> = (1..=n as i64).collect();
    let mut word = Vec::with_capacity(n);
    for (i, &ri) in r.iter().enumerate() {
        let limit = (n - 1 - i) as u64;
        if ri > limit {
            return Err(Error::RejectSupport {
                index: i + 1,
                value: ri,
                limit,
            });
        }
        word.push(remaining.remove(ri as usize));
    }
    PermWindow::new(1, word)
}

/// Inverse of the left-count encoding on `{1..n}`, built right to left: the
/// letter at position `i` is the `(ell_i + 1)`-th largest value not yet used.
pub fn eliminate_left(ell: &[u64]) -> Result<PermWindow> {
    let n = ell.len();
    let mut remaining: Vec<i64> = (1..=n as i64).collect();
    let mut word = vec![0i64; n];
    for i in (0..n).rev() {
        let limit = i as u64;
        if ell[i] > limit {
            return Err(Error::RejectSupport {
                index: i + 1,
                value: ell[i],
                limit,
            });
        }
        let k = remaining.len() - 1 - ell[i] as usize;
        word[i] = remaining.remove(k);
    }
    PermWindow::new(1, word)
}

/// Right inversion counts known on a window of positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RWindow {
    lo: i64,
    r: Vec<u64>,
}

impl RWindow {
    pub fn new(lo: i64, r: Vec<u64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidInterval { lo, hi: lo - 1 });
        }
        Ok(Self { lo, r })
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.lo + self.r.len() as i64 - 1,
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.r
    }

    pub fn get(&self, i: i64) -> Option<u64> {
        if i < self.lo {
            return None;
        }
        self.r.get((i - self.lo) as usize).copied()
    }
}

/// Result of the leftward scan that recovers one left inversion count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllEstimate {
    pub ell: u64,
    pub certified: bool,
    /// Bound on the probability (under i.i.d. geometric right counts) that
    /// positions further left would still increment `ell`.
    pub residual: f64,
    /// Number of positions to the left of `j` that were consumed.
    pub consumed: u64,
}

/// Probability bound `q^{x+1} / (1-q)` that a chain currently at state `x`
/// makes at least one more trivial transition.
#[inline]
pub fn chain_residual(x: u64, p: &QParam) -> f64 {
    p.pow(x + 1) / (1.0 - p.q())
}

/// Recovers `ell_j` from right counts by scanning leftwards.
///
/// The state starts at `x = r_j`; an index `i < j` with `r_i > x` is a left
/// inversion of `j` and leaves the state alone, otherwise the state grows by
/// one. The scan stops once `q^{x+1}/(1-q) <= eps_tv`. `extend(i)` supplies
/// `r_i` for `i` left of the window and must answer consistently across
/// calls; without it the scan ends at the window edge, uncertified if the
/// residual is still above `eps_tv`.
pub fn reconstruct_ell(
    r_window: &RWindow,
    j: i64,
    p: &QParam,
    eps_tv: f64,
    mut extend: Option<&mut dyn FnMut(i64) -> u64>,
) -> EllEstimate {
    let mut x = r_window
        .get(j)
        .expect("reconstruct_ell: position j must lie in the window");
    let mut ell = 0u64;
    let mut i = j - 1;
    loop {
        let residual = chain_residual(x, p);
        if residual <= eps_tv {
            return EllEstimate {
                ell,
                certified: true,
                residual,
                consumed: (j - 1 - i) as u64,
            };
        }
        let ri = match r_window.get(i) {
            Some(v) => v,
            None => match extend.as_mut() {
                Some(f) => f(i),
                None => {
                    return EllEstimate {
                        ell,
                        certified: false,
                        residual,
                        consumed: (j - 1 - i) as u64,
                    }
                }
            },
        };
        if ri > x {
            ell += 1;
        } else {
            x += 1;
        }
        i -= 1;
    }
}

/// `sigma(i) = i + r_i - ell_i` on the window; requires every left count to
/// be certified and the produced values to be distinct.
pub fn rebuild_sigma(ic: &InversionCounts) -> Result<PermWindow> {
    let mut seen: HashMap<i64, i64> = HashMap::with_capacity(ic.r.len());
    let mut values = Vec::with_capacity(ic.r.len());
    for (k, ((&r, &l), &ok)) in ic.r.iter().zip(&ic.ell).zip(&ic.ell_certified).enumerate() {
        let i = ic.lo + k as i64;
        if !ok {
            return Err(Error::NotCertified(i));
        }
        let v = i + r as i64 - l as i64;
        if let Some(&first) = seen.get(&v) {
            return Err(Error::NotInjective {
                value: v,
                first,
                second: i,
            });
        }
        seen.insert(v, i);
        values.push(v);
    }
    Ok(PermWindow::from_parts_unchecked(ic.lo, values))
}

/// Effect of swapping the letters at positions `i, i+1` on the pair of right
/// counts `(r_i, r_{i+1})`. The map is an involution.
pub fn adjacent_swap_r(r_i: u64, r_next: u64) -> (u64, u64) {
    if r_i <= r_next {
        (r_next + 1, r_i)
    } else {
        (r_next, r_i - 1)
    }
}

/// Balance of a window: `#{i >= 1 : sigma(i) <= 0} - #{i <= 0 : sigma(i) >= 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderDiagnostic {
    /// Both block counts are unchanged when the window shrinks by one
    /// position on each side.
    pub admissible_hint: bool,
    pub balance_estimate: Option<i64>,
    /// Left end of the smallest centred sub-window that already shows the
    /// full block counts.
    pub stable_from: i64,
}

pub fn window_balance(w: &PermWindow) -> OrderDiagnostic {
    // (#{i <= 0 : sigma(i) >= 1}, #{i >= 1 : sigma(i) <= 0}) on [lo+k..hi-k]
    let counts = |k: i64| -> (u64, u64) {
        let mut neg_to_pos = 0;
        let mut pos_to_neg = 0;
        for i in w.lo + k..=w.hi - k {
            let v = w.values[(i - w.lo) as usize];
            if i <= 0 && v >= 1 {
                neg_to_pos += 1;
            } else if i >= 1 && v <= 0 {
                pos_to_neg += 1;
            }
        }
        (neg_to_pos, pos_to_neg)
    };
    let straddles = |k: i64| w.lo + k <= 0 && w.hi - k >= 1;

    let full = counts(0);
    let mut k_stable = 0;
    while straddles(k_stable + 1) && counts(k_stable + 1) == full {
        k_stable += 1;
    }
    let admissible_hint = straddles(1) && counts(1) == full;
    let balance = full.1 as i64 - full.0 as i64;
    OrderDiagnostic {
        admissible_hint,
        balance_estimate: admissible_hint.then_some(balance),
        stable_from: w.lo + k_stable,
    }
}

/// Order-isomorphic relabelling of `sigma` restricted to `sub` onto `sub`.
pub fn truncate(w: &PermWindow, sub: Interval) -> Result<PermWindow> {
    let part = w.restrict(sub)?;
    let mut order: Vec<usize> = (0..part.len()).collect();
    order.sort_unstable_by_key(|&k| part.values[k]);
    let mut values = vec![0i64; part.len()];
    for (rank, &k) in order.iter().enumerate() {
        values[k] = sub.lo + rank as i64;
    }
    Ok(PermWindow::from_parts_unchecked(sub.lo, values))
}

/// Inverse permutation of a self-contained window.
pub fn invert_window(w: &PermWindow) -> Result<PermWindow> {
    if !w.is_self_contained() {
        return Err(Error::NotSelfContained { lo: w.lo, hi: w.hi });
    }
    let mut values = vec![0i64; w.len()];
    for (k, &v) in w.values.iter().enumerate() {
        values[(v - w.lo) as usize] = w.lo + k as i64;
    }
    Ok(PermWindow::from_parts_unchecked(w.lo, values))
}

/// Smallest self-contained interval of `w` containing `sub`, if the window
/// is wide enough to exhibit one.
pub fn self_contained_hull(w: &PermWindow, sub: Interval) -> Option<Interval> {
    let mut cur = sub;
    loop {
        if !w.interval().contains_interval(&cur) {
            return None;
        }
        let mut next = cur;
        for i in cur.iter() {
            let v = w.value_at(i)?;
            next.lo = next.lo.min(v);
            next.hi = next.hi.max(v);
        }
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
}

/// Per-position outcome of [`validate_r_window`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EllStatus {
    /// The scan certified and no later index incremented the count.
    Certified { ell: u64 },
    /// The window ended before the residual dropped below the budget.
    Uncertified { partial: u64 },
    /// The count kept growing after certification: `late` extra left
    /// inversions were seen, which is evidence of an infinite left count.
    Contradicted { at_certification: u64, late: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Suspect,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RValidation {
    pub interval: Interval,
    pub zero_positions: Vec<i64>,
    /// Length of the run of nonzero counts at the right end of the window.
    pub trailing_nonzero_run: usize,
    pub ell: Vec<EllStatus>,
    /// Pairs of positions whose values, rebuilt from the left counts at
    /// certification time, coincide.
    pub collisions: Vec<(i64, i64)>,
    pub verdict: Verdict,
}

/// Finite-window proxy for the two conditions characterising right-count
/// sequences of balanced permutations.
///
/// Every position is scanned over the whole window. A count that still grows
/// after its residual fell below `eps_tv` is `Contradicted`, an event of
/// probability at most `eps_tv` per position under i.i.d. geometric counts.
/// A trailing run of nonzero counts of length `L` with `q^L <= eps_tv` is
/// likewise improbable. Either makes the verdict `Suspect`. Otherwise a
/// collision among the values `j + r_j - ell_j` rebuilt from the counts at
/// certification time makes it `Invalid`.
pub fn validate_r_window(r_window: &RWindow, p: &QParam, eps_tv: f64) -> RValidation {
    let interval = r_window.interval();
    let zero_positions: Vec<i64> = interval
        .iter()
        .filter(|&i| r_window.get(i) == Some(0))
        .collect();
    let trailing_nonzero_run = r_window
        .values()
        .iter()
        .rev()
        .take_while(|&&r| r != 0)
        .count();

    let mut statuses = Vec::with_capacity(interval.len());
    for j in interval.iter() {
        let mut x = r_window.get(j).unwrap();
        let mut ell = 0u64;
        let mut at_certification = None;
        for i in (interval.lo..j).rev() {
            if at_certification.is_none() && chain_residual(x, p) <= eps_tv {
                at_certification = Some(ell);
            }
            if r_window.get(i).unwrap() > x {
                ell += 1;
            } else {
                x += 1;
            }
        }
        if at_certification.is_none() && chain_residual(x, p) <= eps_tv {
            at_certification = Some(ell);
        }
        statuses.push(match at_certification {
            None => EllStatus::Uncertified { partial: ell },
            Some(c) if c == ell => EllStatus::Certified { ell },
            Some(c) => EllStatus::Contradicted {
                at_certification: c,
                late: ell - c,
            },
        });
    }

    let mut seen: HashMap<i64, i64> = HashMap::new();
    let mut collisions = Vec::new();
    for (j, status) in interval.iter().zip(&statuses) {
        let ell = match *status {
            EllStatus::Certified { ell } => ell,
            EllStatus::Contradicted {
                at_certification, ..
            } => at_certification,
            EllStatus::Uncertified { .. } => continue,
        };
        let v = j + r_window.get(j).unwrap() as i64 - ell as i64;
        if let Some(first) = seen.insert(v, j) {
            collisions.push((first, j));
        }
    }
    let contradicted = statuses
        .iter()
        .any(|s| matches!(s, EllStatus::Contradicted { .. }));
    let starved = p.pow(trailing_nonzero_run as u64) <= eps_tv;

    let verdict = if contradicted || starved {
        Verdict::Suspect
    } else if !collisions.is_empty() {
        Verdict::Invalid
    } else {
        Verdict::Consistent
    };
    RValidation {
        interval,
        zero_positions,
        trailing_nonzero_run,
        ell: statuses,
        collisions,
        verdict,
    }
}

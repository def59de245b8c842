//! The isolation scan: symmetric interval expansion, threshold tests and
//! restarts after each detection, plus the windowed variant for long series.

use crate::contrast::ContrastKernel;
use crate::error::{Error, Result};
use crate::prune::neighbor_prune;
use crate::types::{ChangePointEstimate, RestartMode, Side, SignalClass};

/// Detection threshold `C * sqrt(2 ln T)` for unit noise.
pub fn threshold_value(len: usize, constant: f64) -> f64 {
    constant * (2.0 * (len as f64).ln()).sqrt()
}

/// Right- and left-expanding end points over `[offset + 1, offset + len]`.
///
/// With `K = ceil(len / lambda)`, right points are `offset + j*lambda` for
/// `j < K` followed by the last index; left points are
/// `offset + len - j*lambda + 1` for `j < K` followed by the first index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionGrid {
    lambda: usize,
    offset: usize,
    len: usize,
}

impl ExpansionGrid {
    /// Grid over the sub-range `[lo, hi]` of a longer series. `lambda` is
    /// clamped to the range length.
    pub fn over(lo: usize, hi: usize, lambda: usize) -> Result<Self> {
        if lo == 0 || hi < lo || lambda == 0 {
            return Err(Error::BadLambda {
                lambda,
                len: hi.saturating_sub(lo) + 1,
            });
        }
        let len = hi - lo + 1;
        Ok(Self {
            lambda: lambda.min(len),
            offset: lo - 1,
            len,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// `K = ceil(len / lambda)`.
    pub fn k(&self) -> usize {
        self.len.div_ceil(self.lambda)
    }

    fn first(&self) -> usize {
        self.offset + 1
    }

    fn last(&self) -> usize {
        self.offset + self.len
    }

    pub fn right_points(&self) -> Vec<usize> {
        let k = self.k();
        (1..k)
            .map(|j| self.offset + j * self.lambda)
            .chain(std::iter::once(self.last()))
            .collect()
    }

    pub fn left_points(&self) -> Vec<usize> {
        let k = self.k();
        (1..k)
            .map(|j| self.last() + 1 - j * self.lambda)
            .chain(std::iter::once(self.first()))
            .collect()
    }

    fn sequences(&self, s: usize, e: usize) -> Sequences {
        let (lam, off, hi) = (self.lambda, self.offset, self.last());
        // Interior grid points strictly between s and e; c_K^r and c_K^l never
        // qualify, so the bound j < K holds automatically.
        let r_first = (s - off) / lam + 1;
        let r_last = (e - off - 1) / lam;
        let l_first = (hi + 1 - e) / lam + 1;
        let l_last = (hi - s) / lam;
        Sequences {
            s,
            e,
            lambda: lam,
            offset: off,
            hi,
            r_first,
            r_count: (r_last + 1).saturating_sub(r_first),
            l_first,
            l_count: (l_last + 1).saturating_sub(l_first),
        }
    }
}

/// Grid over a whole series of length `len`.
pub fn expansion_grid(len: usize, lambda: usize) -> Result<ExpansionGrid> {
    if len < 2 || lambda == 0 || lambda > len {
        return Err(Error::BadLambda { lambda, len });
    }
    ExpansionGrid::over(1, len, lambda)
}

/// Lazily evaluated expanding sequences for one working interval.
#[derive(Debug, Clone, Copy)]
struct Sequences {
    s: usize,
    e: usize,
    lambda: usize,
    offset: usize,
    hi: usize,
    r_first: usize,
    r_count: usize,
    l_first: usize,
    l_count: usize,
}

impl Sequences {
    fn right_len(&self) -> usize {
        self.r_count + 1
    }

    fn left_len(&self) -> usize {
        self.l_count + 1
    }

    fn right(&self, i: usize) -> usize {
        if i < self.r_count {
            self.offset + (self.r_first + i) * self.lambda
        } else {
            self.e
        }
    }

    fn left(&self, i: usize) -> usize {
        if i < self.l_count {
            self.hi + 1 - (self.l_first + i) * self.lambda
        } else {
            self.s
        }
    }
}

/// A working interval `[s, e]` together with its expanding sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingInterval {
    pub s: usize,
    pub e: usize,
    /// End points of the right-expanding intervals `[s, c]`, ending with `e`.
    pub right_seq: Vec<usize>,
    /// Start points of the left-expanding intervals `[c, e]`, ending with `s`.
    pub left_seq: Vec<usize>,
}

pub fn expanding_sequences(grid: &ExpansionGrid, s: usize, e: usize) -> Result<WorkingInterval> {
    if !(s >= grid.first() && s < e && e <= grid.last()) {
        return Err(Error::IndexOrder {
            s,
            b: s,
            e,
            len: grid.last(),
        });
    }
    let seq = grid.sequences(s, e);
    Ok(WorkingInterval {
        s,
        e,
        right_seq: (0..seq.right_len()).map(|i| seq.right(i)).collect(),
        left_seq: (0..seq.left_len()).map(|i| seq.left(i)).collect(),
    })
}

/// Tests `[s, right[0]], [left[0], e], [s, right[1]], ...` in turn and
/// returns the first sub-interval whose maximal contrast exceeds `zeta`.
/// Once one side runs out the other continues alone.
#[allow(clippy::too_many_arguments)]
fn scan<R, L>(
    kernel: &ContrastKernel,
    s: usize,
    e: usize,
    n_right: usize,
    right: R,
    n_left: usize,
    left: L,
    zeta: f64,
) -> Option<ChangePointEstimate>
where
    R: Fn(usize) -> usize,
    L: Fn(usize) -> usize,
{
    let min_span = kernel.min_span();
    let test = |lo: usize, hi: usize, side: Side| -> Option<ChangePointEstimate> {
        if hi < lo + min_span {
            return None;
        }
        let (b, value) = kernel.argmax(lo, hi).ok()?;
        (value > zeta).then_some(ChangePointEstimate {
            location: b,
            contrast_value: value,
            interval: (lo, hi),
            side,
        })
    };
    for i in 0..n_right.max(n_left) {
        if i < n_right {
            if let Some(found) = test(s, right(i), Side::RightExpanding) {
                return Some(found);
            }
        }
        if i < n_left {
            if let Some(found) = test(left(i), e, Side::LeftExpanding) {
                return Some(found);
            }
        }
    }
    None
}

/// First detection on the working interval, if any.
pub fn detect_in_interval(
    kernel: &ContrastKernel,
    interval: &WorkingInterval,
    zeta: f64,
) -> Option<ChangePointEstimate> {
    let (r, l) = (&interval.right_seq, &interval.left_seq);
    scan(
        kernel,
        interval.s,
        interval.e,
        r.len(),
        |i| r[i],
        l.len(),
        |i| l[i],
        zeta,
    )
}

/// Parameters of one threshold scan. `zeta` is on the data scale, i.e. the
/// unit-noise threshold already multiplied by the noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub lambda: usize,
    pub zeta: f64,
    pub restart: RestartMode,
}

fn restart_point(
    class: SignalClass,
    mode: RestartMode,
    est: &ChangePointEstimate,
    s: usize,
    e: usize,
) -> (usize, usize) {
    match (est.side, mode) {
        (Side::RightExpanding, RestartMode::IntervalEnd) => (est.interval.1, e),
        (Side::RightExpanding, RestartMode::EstimatePoint) => {
            (class.segment_start_after(est.location), e)
        }
        (Side::LeftExpanding, RestartMode::IntervalEnd) => (s, est.interval.0),
        (Side::LeftExpanding, RestartMode::EstimatePoint) => (s, est.location),
    }
}

/// Isolation scan restricted to `[lo, hi]`, with the grid anchored there.
pub fn isolate_detect_range(
    kernel: &ContrastKernel,
    lo: usize,
    hi: usize,
    params: &ScanParams,
) -> Result<Vec<ChangePointEstimate>> {
    if params.lambda == 0 {
        return Err(Error::BadLambda {
            lambda: 0,
            len: kernel.len(),
        });
    }
    if lo == 0 || hi > kernel.len() {
        return Err(Error::IndexOrder {
            s: lo,
            b: lo,
            e: hi,
            len: kernel.len(),
        });
    }
    let mut found = Vec::new();
    if hi < lo + kernel.min_span() {
        return Ok(found);
    }
    let grid = ExpansionGrid::over(lo, hi, params.lambda)?;
    let (mut s, mut e) = (lo, hi);
    while e >= s + kernel.min_span() {
        let seq = grid.sequences(s, e);
        let hit = scan(
            kernel,
            s,
            e,
            seq.right_len(),
            |i| seq.right(i),
            seq.left_len(),
            |i| seq.left(i),
            params.zeta,
        );
        let Some(est) = hit else { break };
        let (ns, ne) = restart_point(kernel.class(), params.restart, &est, s, e);
        debug_assert!(ns >= s && ne <= e && (ns, ne) != (s, e));
        found.push(est);
        (s, e) = (ns, ne);
    }
    found.sort_by_key(|est| est.location);
    found.dedup_by_key(|est| est.location);
    Ok(found)
}

/// Isolation scan over the whole series.
pub fn isolate_detect(
    kernel: &ContrastKernel,
    params: &ScanParams,
) -> Result<Vec<ChangePointEstimate>> {
    isolate_detect_range(kernel, 1, kernel.len(), params)
}

/// When and how long series are split into windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowPolicy {
    pub window_len: usize,
    /// Windowing applies only for `T > trigger`.
    pub trigger: usize,
}

impl WindowPolicy {
    /// A policy that never splits.
    pub fn off() -> Self {
        Self {
            window_len: usize::MAX,
            trigger: usize::MAX,
        }
    }
}

/// Contrast of `b` on the segment bounded by its neighbours `prev` and
/// `next`, zero when the triple is not admissible.
pub(crate) fn bounded_contrast(kernel: &ContrastKernel, prev: usize, b: usize, next: usize) -> f64 {
    let s = kernel.class().segment_start_after(prev).max(1);
    kernel.contrast_or_zero(s, next, b)
}

/// Left stand-in neighbour: index 0 for level shifts (so the segment starts
/// at 1) and index 1 for kinks.
pub(crate) fn left_boundary(class: SignalClass) -> usize {
    match class {
        SignalClass::PiecewiseConstant => 0,
        SignalClass::ContinuousPiecewiseLinear => 1,
    }
}

/// Isolation scan for long series.
///
/// For `T > trigger` the series is cut into `ceil(T / window_len)` windows of
/// near-equal length, each scanned independently. A short patch of
/// `10 * lambda` points on either side of every cut is scanned as well so
/// that changes at a window edge are not lost. The merged candidates are
/// then re-validated: the one with the weakest contrast between its
/// neighbours is dropped while that contrast is at most `zeta`.
pub fn detect_windowed(
    kernel: &ContrastKernel,
    params: &ScanParams,
    policy: &WindowPolicy,
) -> Result<Vec<ChangePointEstimate>> {
    let len = kernel.len();
    if len <= policy.trigger {
        return isolate_detect(kernel, params);
    }
    let n_windows = len.div_ceil(policy.window_len.max(1));
    let cut = |k: usize| k * len / n_windows;
    let mut all = Vec::new();
    for k in 0..n_windows {
        all.extend(isolate_detect_range(
            kernel,
            cut(k) + 1,
            cut(k + 1),
            params,
        )?);
    }
    let half = 10 * params.lambda;
    for k in 1..n_windows {
        let edge = cut(k);
        let lo = edge.saturating_sub(half) + 1;
        let hi = (edge + half).min(len);
        all.extend(isolate_detect_range(kernel, lo, hi, params)?);
    }
    all.sort_by(|a, b| {
        a.location
            .cmp(&b.location)
            .then(b.contrast_value.total_cmp(&a.contrast_value))
    });
    all.dedup_by_key(|est| est.location);

    let points: Vec<usize> = all.iter().map(|est| est.location).collect();
    let class = kernel.class();
    let outcome = neighbor_prune(
        &points,
        left_boundary(class),
        len,
        |p, b, n| bounded_contrast(kernel, p, b, n),
        Some(params.zeta),
    );
    let kept: std::collections::HashSet<usize> = outcome.kept.into_iter().collect();
    all.retain(|est| kept.contains(&est.location));
    Ok(all)
}

//! Per-iteration solve traces. Every solver emits one; every diagnostic
//! consumes one.

use ndarray::Array1;

/// Which solver produced a trace. Checks use this to reject traces whose
/// recorded quantities mean something else (e.g. a prox trace's `grad_norm`
/// is a scaled step residual, not a gradient norm).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoKind {
    Subgradient,
    Backtracking,
    Prox,
    FrankWolfe,
    Cccp,
}

/// Terminal state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Residual fell to or below the configured tolerance.
    Converged,
    /// Iteration cap reached with the residual still above tolerance.
    IterCap,
    /// A non-finite value appeared, or backtracking underflowed its step.
    Diverged,
}

/// Columnar record of a run. All per-iteration arrays share one length, one
/// entry per visited iterate `x^0 .. x^K`. Row `k` holds quantities measured
/// at `x^k`: the objective, the residual, and the step *taken from* `x^k`
/// (zero on the final row, where no step was taken).
#[derive(Debug, Clone)]
pub struct SolveTrace {
    /// Objective value f(x^k).
    pub f_val: Vec<f64>,
    /// Residual at x^k: the norm of grad g - u for gradient-type methods, the
    /// scaled step ||x^k - x^{k+1}|| / alpha for prox-type methods and CCCP.
    pub grad_norm: Vec<f64>,
    /// ||x^k - x^{k+1}||, zero on the final row.
    pub step_norm: Vec<f64>,
    /// Frank-Wolfe gap at x^k; `None` for other solvers.
    pub fw_gap: Vec<Option<f64>>,
    /// Step size used from x^k (accepted backtracking step, fixed alpha, or
    /// Frank-Wolfe line parameter); zero on the final row.
    pub step_size: Vec<f64>,
    /// Wall-clock seconds from solver entry to the recording of row k.
    pub elapsed: Vec<f64>,
    /// Cumulative inner-iteration count through row k (CCCP only, else empty).
    pub inner_iters: Vec<usize>,
    /// Whether any CCCP inner solve stopped at its iteration cap.
    pub inner_cap_hit: bool,
    /// Final iterate.
    pub x_final: Array1<f64>,
    pub status: SolveStatus,
    pub algo: AlgoKind,
}

impl SolveTrace {
    /// Number of recorded iterates (steps taken plus one).
    pub fn len(&self) -> usize {
        self.f_val.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_val.is_empty()
    }

    /// All per-iteration arrays share one length.
    pub fn arrays_consistent(&self) -> bool {
        let n = self.f_val.len();
        self.grad_norm.len() == n
            && self.step_norm.len() == n
            && self.fw_gap.len() == n
            && self.step_size.len() == n
            && self.elapsed.len() == n
            && (self.inner_iters.is_empty() || self.inner_iters.len() == n)
    }
}

/// Incremental trace assembly used inside the solvers; keeps the parallel
/// arrays in sync by construction.
pub(crate) struct TraceBuilder {
    algo: AlgoKind,
    start: std::time::Instant,
    f_val: Vec<f64>,
    grad_norm: Vec<f64>,
    step_norm: Vec<f64>,
    fw_gap: Vec<Option<f64>>,
    step_size: Vec<f64>,
    elapsed: Vec<f64>,
    inner_iters: Vec<usize>,
    inner_cap_hit: bool,
}

impl TraceBuilder {
    pub fn new(algo: AlgoKind, capacity: usize) -> Self {
        TraceBuilder {
            algo,
            start: std::time::Instant::now(),
            f_val: Vec::with_capacity(capacity),
            grad_norm: Vec::with_capacity(capacity),
            step_norm: Vec::with_capacity(capacity),
            fw_gap: Vec::with_capacity(capacity),
            step_size: Vec::with_capacity(capacity),
            elapsed: Vec::with_capacity(capacity),
            inner_iters: Vec::new(),
            inner_cap_hit: false,
        }
    }

    /// Record a row where a step of the given size and norm was taken.
    pub fn push_step(&mut self, f: f64, residual: f64, step_norm: f64, gap: Option<f64>, step: f64) {
        self.f_val.push(f);
        self.grad_norm.push(residual);
        self.step_norm.push(step_norm);
        self.fw_gap.push(gap);
        self.step_size.push(step);
        self.elapsed.push(self.start.elapsed().as_secs_f64());
    }

    /// Record the terminal row (no step taken from it).
    pub fn push_final(&mut self, f: f64, residual: f64, gap: Option<f64>) {
        self.push_step(f, residual, 0.0, gap, 0.0);
    }

    pub fn push_inner(&mut self, cumulative: usize) {
        self.inner_iters.push(cumulative);
    }

    pub fn flag_inner_cap(&mut self) {
        self.inner_cap_hit = true;
    }

    pub fn finish(self, x_final: Array1<f64>, status: SolveStatus) -> SolveTrace {
        SolveTrace {
            f_val: self.f_val,
            grad_norm: self.grad_norm,
            step_norm: self.step_norm,
            fw_gap: self.fw_gap,
            step_size: self.step_size,
            elapsed: self.elapsed,
            inner_iters: self.inner_iters,
            inner_cap_hit: self.inner_cap_hit,
            x_final,
            status,
            algo: self.algo,
        }
    }
}

//! Local dominating bound for the Erlang gap intensity.
//!
//! For a candidate point flanked by configuration points `a < ξ < b`, the
//! intensity `π(ξ-a)π(b-ξ)/π(b-a)` is maximised at the midpoint, giving the
//! cell bound `λ^α/(α-1)! ((b-a)/4)^{α-1}`. For the last cell with nothing
//! observed to the right the survival form applies; it is monotone
//! increasing over the cell when `λ - (α-1)/(b-a) < 0`, in which case the
//! right-endpoint value is the exact supremum, and otherwise a product bound
//! with the same quartering argument applies. Cell spans never exceed the
//! horizon, so a finite state-independent cap exists.

use crate::config::{BrokenWindow, OrderedConfig};
use crate::error::{Error, Result};
use crate::numeric::ln_factorial;
use crate::model::SequentialDensity;
use crate::renewal::ErlangModel;
use crate::samplers::bd::{BoundCell, LocalBound};

/// Dominating bound for [`RenewalGapTarget`](crate::samplers::RenewalGapTarget)
/// with the same boundary data.
#[derive(Debug, Clone)]
pub struct ErlangLocalBound {
    model: ErlangModel,
    window: BrokenWindow,
    anchor: f64,
    successor: Option<f64>,
    cap: f64,
}

/// Build the piecewise-constant bound from the model, window and observed
/// boundary configurations.
pub fn erlang_local_bound(
    model: &ErlangModel,
    window: &BrokenWindow,
    left: &OrderedConfig,
    right: &OrderedConfig,
) -> Result<ErlangLocalBound> {
    if (model.horizon() - window.t_end()).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "window t_end must equal the model horizon".into(),
        ));
    }
    if left.last().is_some_and(|t| t > window.t1()) {
        return Err(Error::InvalidData(
            "left configuration extends past t1".into(),
        ));
    }
    if right.first().is_some_and(|t| t < window.t2()) {
        return Err(Error::InvalidData(
            "right configuration starts before t2".into(),
        ));
    }
    Ok(ErlangLocalBound {
        model: *model,
        window: *window,
        anchor: left.last().unwrap_or(0.0),
        successor: right.first(),
        cap: global_cap(model),
    })
}

/// State-independent cap: both cell-bound forms are non-decreasing in the
/// flanking span, which is at most the horizon.
pub(crate) fn global_cap(model: &ErlangModel) -> f64 {
    if model.shape() == 1 {
        return model.rate();
    }
    flanked_cell_bound(model, model.horizon())
        .max(survival_generic_bound(model, model.horizon()))
}

/// `λ^α/(α-1)! (d/4)^{α-1}` for a cell flanked at distance `d`.
fn flanked_cell_bound(model: &ErlangModel, d: f64) -> f64 {
    let a = f64::from(model.shape());
    (a * model.rate().ln() + (a - 1.0) * (d / 4.0).ln()
        - ln_factorial(u64::from(model.shape()) - 1))
    .exp()
}

/// Product bound for the survival form over a span `d`:
/// `λ^α d^{α-1} / ((α-1)! Σ_{i<α} (λd)^i/i!) · Σ_{i<α} (λd/4)^i/i!`.
fn survival_generic_bound(model: &ErlangModel, d: f64) -> f64 {
    let shape = model.shape();
    let a = f64::from(shape);
    let y = model.rate() * d;
    let mut s_full = 1.0_f64;
    let mut s_quarter = 1.0_f64;
    let mut term_full = 1.0_f64;
    let mut term_quarter = 1.0_f64;
    for i in 1..shape {
        term_full *= y / f64::from(i);
        term_quarter *= (y / 4.0) / f64::from(i);
        s_full += term_full;
        s_quarter += term_quarter;
    }
    (a * model.rate().ln() + (a - 1.0) * d.ln() - ln_factorial(u64::from(shape) - 1)).exp()
        * s_quarter
        / s_full
}

impl ErlangLocalBound {
    fn survival_cell_value(&self, prev: f64) -> f64 {
        let model = &self.model;
        if model.shape() == 1 {
            return model.rate();
        }
        let span = model.horizon() - prev;
        let monotone = model.rate() - (f64::from(model.shape()) - 1.0) / span < 0.0;
        if monotone {
            // intensity increases across the cell; its right endpoint is the supremum
            model
                .log_flanked_intensity(prev, None, self.window.t2())
                .exp()
        } else {
            survival_generic_bound(model, span)
        }
    }
}

impl LocalBound for ErlangLocalBound {
    fn cells(&self, gap: &OrderedConfig) -> Vec<BoundCell> {
        let model = &self.model;
        let n = gap.len();
        let mut cells = Vec::with_capacity(n + 1);
        let mut lo = self.window.t1();
        for (i, &hi) in gap.times().iter().enumerate() {
            let prev = if i == 0 { self.anchor } else { gap.times()[i - 1] };
            let value = if model.shape() == 1 {
                model.rate()
            } else {
                flanked_cell_bound(model, hi - prev)
            };
            cells.push(BoundCell { lo, hi, value });
            lo = hi;
        }
        let prev = if n == 0 { self.anchor } else { gap.times()[n - 1] };
        let value = match self.successor {
            _ if model.shape() == 1 => model.rate(),
            Some(succ) => flanked_cell_bound(model, succ - prev),
            None => self.survival_cell_value(prev),
        };
        cells.push(BoundCell {
            lo,
            hi: self.window.t2(),
            value,
        });
        cells
    }

    fn global_cap(&self) -> f64 {
        self.cap
    }
}

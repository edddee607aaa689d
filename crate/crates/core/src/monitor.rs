use std::borrow::Borrow;

use crate::data::Dataset;
use crate::diagnostics::{
    duality_gap_blocks, potential_c, primal_value, relation_residual, ReferenceSolution, Regime,
    RunRecord,
};
use crate::dual::DualState;
use crate::error::Result;
use crate::loss::LossModel;

/// Computes [`RunRecord`]s from solver state.
pub(crate) struct Monitor<'a> {
    data: &'a Dataset,
    model: &'a LossModel,
    lambda: f64,
    reference: Option<&'a ReferenceSolution>,
    smoothness: f64,
    regime: Regime,
}

impl<'a> Monitor<'a> {
    pub fn new(
        data: &'a Dataset,
        model: &'a LossModel,
        lambda: f64,
        reference: Option<&'a ReferenceSolution>,
    ) -> Result<Self> {
        Ok(Self {
            data,
            model,
            lambda,
            reference,
            smoothness: model.smoothness(data)?,
            regime: Regime::of(model),
        })
    }

    /// Snapshot with the full dual visible. `blocks` must tile the dataset.
    #[allow(clippy::too_many_arguments)]
    pub fn snapshot<B: Borrow<DualState>>(
        &self,
        blocks: &[B],
        w: &[f64],
        (epoch, server_iter): (usize, usize),
        virtual_time: f64,
        epochs_equiv: f64,
        max_delay: u64,
        epoch_boundary: bool,
    ) -> Result<RunRecord> {
        let duality_gap = if self.model.is_convex() && blocks.iter().all(|b| b.borrow().is_compact()) {
            Some(duality_gap_blocks(self.data, self.model, self.lambda, blocks)?)
        } else {
            None
        };
        let potential = match self.reference {
            Some(r) => Some(potential_c(
                self.data,
                self.model,
                blocks,
                w,
                r,
                self.lambda,
                self.smoothness,
                self.regime,
            )?),
            None => None,
        };
        Ok(RunRecord {
            epoch,
            server_iter,
            virtual_time,
            epochs_equiv,
            duality_gap,
            suboptimality: self.suboptimality(w)?,
            potential_c: potential,
            max_delay,
            relation_residual: Some(relation_residual(self.data, blocks, w)),
            epoch_boundary,
        })
    }

    /// Snapshot when only the primal iterate is observable.
    pub fn primal_snapshot(
        &self,
        w: &[f64],
        (epoch, server_iter): (usize, usize),
        virtual_time: f64,
        epochs_equiv: f64,
        max_delay: u64,
        epoch_boundary: bool,
    ) -> Result<RunRecord> {
        Ok(RunRecord {
            epoch,
            server_iter,
            virtual_time,
            epochs_equiv,
            duality_gap: None,
            suboptimality: self.suboptimality(w)?,
            potential_c: None,
            max_delay,
            relation_residual: None,
            epoch_boundary,
        })
    }

    fn suboptimality(&self, w: &[f64]) -> Result<Option<f64>> {
        match self.reference {
            Some(r) => Ok(Some(primal_value(self.data, self.model, self.lambda, w)? - r.p_star)),
            None => Ok(None),
        }
    }
}

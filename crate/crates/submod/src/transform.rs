//! Submodularity-preserving transforms of set functions.
//!
//! Conditioning, restriction, reflection, and conical mixtures all preserve
//! submodularity; each returns a fresh handle whose capability flags are
//! propagated conservatively.

use std::sync::Arc;

use crate::error::{Result, SubmodError};
use crate::function::{Flags, SetFunctionHandle};
use crate::ground::{same_ground, GroundSet, Subset};

/// Descriptor for [`derive_transform`].
pub enum Transform {
    /// `g(A) = f(A ∪ B) - f(B)` for a fixed set `B`.
    Condition(Subset),
    /// `f` on subsets of `W`, re-indexed to a ground set of size `|W|`.
    Restrict(Subset),
    /// `g(A) = f(V \ A)`.
    Reflect,
    /// `g(A) = Σ w_i f_i(A)` with all `w_i >= 0`.
    Mixture(Vec<(f64, SetFunctionHandle)>),
}

/// Builds a new handle from `f` according to the transform descriptor.
pub fn derive_transform(f: &SetFunctionHandle, spec: Transform) -> Result<SetFunctionHandle> {
    match spec {
        Transform::Condition(b) => condition(f, b),
        Transform::Restrict(w) => restrict(f, w),
        Transform::Reflect => Ok(reflect(f)),
        Transform::Mixture(parts) => mixture(f, parts),
    }
}

fn condition(f: &SetFunctionHandle, b: Subset) -> Result<SetFunctionHandle> {
    same_ground(f.ground(), b.ground())?;
    let inner = f.clone();
    let f_b = inner.evaluate(&b)?;
    let old = f.flags();
    let flags = Flags {
        claims_monotone: old.claims_monotone,
        claims_normalized: true,
        claims_symmetric: false,
        // monotone f gives g(A) >= g(empty) = 0
        claims_nonneg: old.claims_monotone,
    };
    Ok(SetFunctionHandle::new(
        Arc::clone(f.ground()),
        flags,
        move |a: &Subset| inner.eval_unchecked(&a.union(&b)) - f_b,
    ))
}

fn restrict(f: &SetFunctionHandle, w: Subset) -> Result<SetFunctionHandle> {
    same_ground(f.ground(), w.ground())?;
    if w.is_empty() {
        return Err(SubmodError::InvalidSpec(
            "restriction window must be nonempty".into(),
        ));
    }
    let members = w.indices();
    let sub_ground = GroundSet::new(members.len())?;
    let inner = f.clone();
    let outer_ground = Arc::clone(f.ground());
    let old = f.flags();
    let flags = Flags {
        claims_monotone: old.claims_monotone,
        claims_normalized: old.claims_normalized,
        claims_symmetric: false,
        claims_nonneg: old.claims_nonneg,
    };
    Ok(SetFunctionHandle::new(sub_ground, flags, move |a: &Subset| {
        let mut lifted = Subset::empty(&outer_ground);
        for i in a.iter() {
            lifted = lifted.with(members[i]);
        }
        inner.eval_unchecked(&lifted)
    }))
}

/// `g(A) = f(V \ A)`; flips the monotone direction, so the monotone claim
/// is cleared.
pub fn reflect(f: &SetFunctionHandle) -> SetFunctionHandle {
    let inner = f.clone();
    let old = f.flags();
    let flags = Flags {
        claims_monotone: false,
        claims_normalized: old.claims_normalized && old.claims_symmetric,
        claims_symmetric: old.claims_symmetric,
        claims_nonneg: old.claims_nonneg,
    };
    SetFunctionHandle::new(Arc::clone(f.ground()), flags, move |a: &Subset| {
        inner.eval_unchecked(&a.complement())
    })
}

fn mixture(f: &SetFunctionHandle, parts: Vec<(f64, SetFunctionHandle)>) -> Result<SetFunctionHandle> {
    if parts.is_empty() {
        return Err(SubmodError::InvalidSpec("mixture needs at least one term".into()));
    }
    let mut flags = Flags {
        claims_monotone: true,
        claims_normalized: true,
        claims_symmetric: true,
        claims_nonneg: true,
    };
    for (w, h) in &parts {
        if !w.is_finite() || *w < 0.0 {
            return Err(SubmodError::InvalidSpec(format!(
                "mixture weight {w} must be non-negative"
            )));
        }
        same_ground(f.ground(), h.ground())?;
        let hf = h.flags();
        flags.claims_monotone &= hf.claims_monotone;
        flags.claims_normalized &= hf.claims_normalized;
        flags.claims_symmetric &= hf.claims_symmetric;
        flags.claims_nonneg &= hf.claims_nonneg;
    }
    Ok(SetFunctionHandle::new(
        Arc::clone(f.ground()),
        flags,
        move |a: &Subset| parts.iter().map(|(w, h)| w * h.eval_unchecked(a)).sum(),
    ))
}

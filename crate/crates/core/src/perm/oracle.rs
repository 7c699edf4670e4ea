//! Oracle interfaces. Adversaries only ever see oracles through [`Counted`]
//! handles so every evaluation is accounted for.

use std::marker::PhantomData;
use std::sync::Arc;

use super::{apply_perm_unitary, Permutation};
use crate::error::{Error, Result};
use crate::qstate::{DenseState, SubsetState};

/// A classical oracle.
pub trait Oracle {
    type Input: Copy;
    type Output;

    fn query(&mut self, input: Self::Input) -> Result<Self::Output>;
}

impl<O: Oracle + ?Sized> Oracle for &mut O {
    type Input = O::Input;
    type Output = O::Output;

    fn query(&mut self, input: O::Input) -> Result<O::Output> {
        (**self).query(input)
    }
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    type Input = O::Input;
    type Output = O::Output;

    fn query(&mut self, input: O::Input) -> Result<O::Output> {
        (**self).query(input)
    }
}

/// An oracle applied to a whole state vector at once.
pub trait UnitaryOracle {
    fn apply(&mut self, state: &DenseState) -> Result<DenseState>;
}

/// Counts evaluations of the wrapped oracle and enforces an optional budget.
#[derive(Debug, Clone)]
pub struct Counted<O> {
    inner: O,
    queries: u64,
    budget: Option<u64>,
}

pub fn counted<O>(oracle: O) -> Counted<O> {
    Counted::new(oracle)
}

impl<O> Counted<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            queries: 0,
            budget: None,
        }
    }

    pub fn with_budget(inner: O, budget: u64) -> Self {
        Self {
            inner,
            queries: 0,
            budget: Some(budget),
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn reset(&mut self) {
        self.queries = 0;
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut O {
        &mut self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    fn charge(&mut self) -> Result<()> {
        if let Some(b) = self.budget {
            if self.queries >= b {
                return Err(Error::BudgetExceeded(format!("oracle query budget of {b} exhausted")));
            }
        }
        self.queries += 1;
        Ok(())
    }
}

impl<O: Oracle> Oracle for Counted<O> {
    type Input = O::Input;
    type Output = O::Output;

    fn query(&mut self, input: O::Input) -> Result<O::Output> {
        self.charge()?;
        self.inner.query(input)
    }
}

impl<U: UnitaryOracle> UnitaryOracle for Counted<U> {
    fn apply(&mut self, state: &DenseState) -> Result<DenseState> {
        self.charge()?;
        self.inner.apply(state)
    }
}

/// Wraps a closure as an oracle.
pub struct FnOracle<F, I, O> {
    f: F,
    _types: PhantomData<fn(I) -> O>,
}

pub fn oracle_fn<I: Copy, O, F: FnMut(I) -> O>(f: F) -> FnOracle<F, I, O> {
    FnOracle {
        f,
        _types: PhantomData,
    }
}

impl<F: FnMut(I) -> O, I: Copy, O> Oracle for FnOracle<F, I, O> {
    type Input = I;
    type Output = O;

    fn query(&mut self, input: I) -> Result<O> {
        Ok((self.f)(input))
    }
}

/// Forward evaluation of a permutation.
#[derive(Debug, Clone)]
pub struct ForwardOracle<P>(pub P);

/// Inverse evaluation of a permutation.
#[derive(Debug, Clone)]
pub struct InverseOracle<P>(pub P);

impl<P: Permutation> Oracle for ForwardOracle<P> {
    type Input = u64;
    type Output = u64;

    fn query(&mut self, x: u64) -> Result<u64> {
        Ok(self.0.forward(x))
    }
}

impl<P: Permutation> Oracle for InverseOracle<P> {
    type Input = u64;
    type Output = u64;

    fn query(&mut self, y: u64) -> Result<u64> {
        Ok(self.0.inverse(y))
    }
}

impl<P: Permutation> UnitaryOracle for ForwardOracle<P> {
    fn apply(&mut self, state: &DenseState) -> Result<DenseState> {
        apply_perm_unitary(&self.0, state)
    }
}

/// `O_S(x) = [x ∈ S]`.
#[derive(Debug, Clone)]
pub struct MembershipOracle {
    set: Arc<SubsetState>,
}

impl MembershipOracle {
    pub fn new(set: Arc<SubsetState>) -> Self {
        Self { set }
    }
}

impl Oracle for MembershipOracle {
    type Input = u64;
    type Output = bool;

    fn query(&mut self, x: u64) -> Result<bool> {
        Ok(self.set.contains(x))
    }
}

/// Logs every input passed to the wrapped oracle.
pub struct Recording<O: Oracle> {
    inner: O,
    log: Vec<O::Input>,
}

impl<O: Oracle> Recording<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            log: Vec::new(),
        }
    }

    pub fn log(&self) -> &[O::Input] {
        &self.log
    }

    pub fn into_parts(self) -> (O, Vec<O::Input>) {
        (self.inner, self.log)
    }
}

impl<O: Oracle> Oracle for Recording<O> {
    type Input = O::Input;
    type Output = O::Output;

    fn query(&mut self, input: O::Input) -> Result<O::Output> {
        let out = self.inner.query(input)?;
        self.log.push(input);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::ExplicitPerm;

    #[test]
    fn counting_contract() {
        let mut o = counted(oracle_fn(|x: u64| x + 1));
        assert_eq!(o.queries(), 0);
        for i in 0..7 {
            assert_eq!(o.query(i).unwrap(), i + 1);
        }
        assert_eq!(o.queries(), 7);
        o.reset();
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn nested_wrappers_count_once_per_layer() {
        let mut o = counted(counted(oracle_fn(|x: u64| x)));
        for i in 0..3 {
            o.query(i).unwrap();
        }
        assert_eq!(o.queries(), 3);
        assert_eq!(o.inner().queries(), 3);
    }

    #[test]
    fn budget_is_enforced() {
        let mut o = Counted::with_budget(oracle_fn(|x: u64| x), 2);
        o.query(0).unwrap();
        o.query(1).unwrap();
        assert!(matches!(o.query(2), Err(Error::BudgetExceeded(_))));
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn unitary_application_counts_one() {
        let p = ExplicitPerm::from_table(1, vec![1, 0]).unwrap();
        let mut o = counted(ForwardOracle(p));
        let s = DenseState::basis(1, 0).unwrap();
        let out = o.apply(&s).unwrap();
        assert_eq!(out, DenseState::basis(1, 1).unwrap());
        assert_eq!(o.queries(), 1);
    }
}

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Nodal values of `u_h` and `w_h` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl FieldState {
    pub fn new(t: f64, u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        crate::error::check_len(u.len(), w.len())?;
        Ok(FieldState { t, u, w })
    }

    pub fn zeros(n: usize, t: f64) -> Self {
        FieldState { t, u: vec![0.0; n], w: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.w).all(|v| v.is_finite())
    }
}

/// The last `capacity` states, oldest first, at uniform spacing `tau`.
#[derive(Debug, Clone)]
pub struct History {
    tau: f64,
    capacity: usize,
    states: VecDeque<FieldState>,
}

/// Relative tolerance on the spacing between consecutive history entries.
const SPACING_TOL: f64 = 1e-9;

impl History {
    pub fn new(capacity: usize, tau: f64) -> Result<Self> {
        if capacity == 0 || !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "history needs capacity >= 1 and tau > 0 (got {capacity}, {tau})"
            )));
        }
        Ok(History { tau, capacity, states: VecDeque::with_capacity(capacity) })
    }

    pub fn from_states(capacity: usize, tau: f64, states: impl IntoIterator<Item = FieldState>) -> Result<Self> {
        let mut h = Self::new(capacity, tau)?;
        for s in states {
            h.push(s)?;
        }
        Ok(h)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.states.len() == self.capacity
    }

    /// Entry `i`, counted from the oldest.
    pub fn get(&self, i: usize) -> Option<&FieldState> {
        self.states.get(i)
    }

    pub fn newest(&self) -> Option<&FieldState> {
        self.states.back()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FieldState> {
        self.states.iter()
    }

    /// Appends a state, dropping the oldest one when full. The new time must
    /// follow the newest one by `tau`, and vector lengths must agree.
    pub fn push(&mut self, state: FieldState) -> Result<()> {
        if let Some(last) = self.states.back() {
            crate::error::check_len(last.len(), state.len())?;
            let gap = state.t - last.t;
            if (gap - self.tau).abs() > SPACING_TOL * self.tau {
                return Err(Error::History(format!(
                    "expected spacing {} but got {} (t = {} after {})",
                    self.tau, gap, state.t, last.t
                )));
            }
        }
        if self.states.len() == self.capacity {
            self.states.pop_front();
        }
        self.states.push_back(state);
        Ok(())
    }
}

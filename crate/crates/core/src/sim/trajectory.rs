use std::io::{self, Write};

use crate::drift::norm;

/// One simulated path on the grid `t_k = k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    dimension: usize,
    states: Vec<f64>,
    pub exit: Option<ExitEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitEvent {
    pub step: usize,
    pub time: f64,
    /// Exit declared by the Brownian-bridge correction rather than by a grid
    /// point lying outside the ball.
    pub bridge: bool,
}

impl Trajectory {
    pub(crate) fn with_capacity(dt: f64, dimension: usize, points: usize) -> Self {
        Self {
            dt,
            dimension,
            states: Vec::with_capacity(points * dimension),
            exit: None,
        }
    }

    /// Builds a trajectory from explicit states (one slice per grid point).
    pub fn from_states(dt: f64, states: &[Vec<f64>]) -> Self {
        let dimension = states.first().map_or(1, Vec::len);
        let mut t = Self::with_capacity(dt, dimension, states.len());
        for s in states {
            assert_eq!(s.len(), dimension, "ragged trajectory");
            t.push(s);
        }
        t
    }

    pub(crate) fn push(&mut self, state: &[f64]) {
        self.states.extend_from_slice(state);
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of grid points (steps + 1).
    pub fn len(&self) -> usize {
        self.states.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dimension..(k + 1) * self.dimension]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dimension)
    }

    pub fn norm_at(&self, k: usize) -> f64 {
        norm(self.state(k))
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn exit_time(&self) -> Option<f64> {
        self.exit.map(|e| e.time)
    }

    /// CSV dump: header `t,x1,...,xd[,exit]`, one row per grid point. The
    /// `exit` column is 1 on the exit row and 0 elsewhere.
    pub fn write_csv<W: Write>(&self, mut out: W, with_exit: bool) -> io::Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.dimension {
            header.push_str(&format!(",x{i}"));
        }
        if with_exit {
            header.push_str(",exit");
        }
        writeln!(out, "{header}")?;
        for (k, s) in self.states().enumerate() {
            write!(out, "{}", self.time(k))?;
            for v in s {
                write!(out, ",{v}")?;
            }
            if with_exit {
                let flag = self.exit.is_some_and(|e| e.step == k);
                write!(out, ",{}", u8::from(flag))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

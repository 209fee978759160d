use crate::domain::{Field, PolarGrid};
use crate::{Error, Result};

/// The pair `(u_1, u_2)` of solution components at a common time.
#[derive(Clone, Debug)]
pub struct StatePair {
    pub u1: Field,
    pub u2: Field,
}

impl StatePair {
    pub fn new(u1: Field, u2: Field) -> Result<Self> {
        if u1.grid() != u2.grid() {
            return Err(Error::Domain("state components live on different grids".into()));
        }
        if u1.time() != u2.time() {
            return Err(Error::Domain(format!(
                "state components carry different times {} and {}",
                u1.time(),
                u2.time()
            )));
        }
        Ok(StatePair { u1, u2 })
    }

    pub fn grid(&self) -> &PolarGrid {
        self.u1.grid()
    }

    pub fn time(&self) -> f64 {
        self.u1.time()
    }

    pub fn set_time(&mut self, t: f64) {
        self.u1.set_time(t);
        self.u2.set_time(t);
    }

    pub fn sup_norm(&self) -> f64 {
        self.u1.sup_norm().max(self.u2.sup_norm())
    }

    pub fn min_value(&self) -> f64 {
        self.u1.min_value().min(self.u2.min_value())
    }

    pub fn component(&self, i: usize) -> &Field {
        match i {
            0 => &self.u1,
            1 => &self.u2,
            _ => panic!("component index out of range"),
        }
    }
}

/// Snapshots of a time integration at requested times, plus the step used.
#[derive(Clone, Debug)]
pub struct Trajectory {
    snapshots: Vec<StatePair>,
    dt: f64,
}

impl Trajectory {
    pub fn new(snapshots: Vec<StatePair>, dt: f64) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::Config("trajectory needs at least one snapshot".into()));
        }
        Ok(Trajectory { snapshots, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &PolarGrid {
        self.snapshots[0].grid()
    }

    pub fn snapshots(&self) -> &[StatePair] {
        &self.snapshots
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(StatePair::time).collect()
    }

    pub fn last(&self) -> &StatePair {
        self.snapshots.last().expect("trajectory is non-empty")
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

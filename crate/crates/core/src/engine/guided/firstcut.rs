//! Cycle check by walking the successor chain to its root.

use super::{guided_engine, Core, Guided, Strategy};
use crate::engine::{Counters, EngineKind};
use crate::trace::Status;

#[derive(Clone, Debug, Default)]
pub(crate) struct Walk {
    steps: u64,
}

impl Strategy for Walk {
    const KIND: EngineKind = EngineKind::FirstCut;

    fn check_cycle(&mut self, core: &mut Core, y: u32, z: u32) -> bool {
        let mut cur = z;
        while core.status[cur as usize] == Status::Unknown {
            self.steps += 1;
            cur = core.succ_class(cur);
        }
        cur == y
    }

    fn counters(&self, c: &mut Counters) {
        c.succ_walk_steps = self.steps;
    }
}

/// Successor forest with a linear walk per cycle check.
#[derive(Clone, Debug)]
pub struct FirstCut {
    inner: Guided<Walk>,
}

guided_engine!(FirstCut, Walk);

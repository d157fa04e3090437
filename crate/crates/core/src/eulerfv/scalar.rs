//! Scalar abstraction so the update kernel can run on `f64` or on an
//! operation-counting wrapper.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Sub};

/// Phase of the cell update an operation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Primitive,
    Rotate,
    PhysicalFlux,
    Central,
    Dissipation,
    RotateBack,
    Scale,
    Update,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Primitive => "primitive",
            Stage::Rotate => "rotate",
            Stage::PhysicalFlux => "physical_flux",
            Stage::Central => "central",
            Stage::Dissipation => "dissipation",
            Stage::RotateBack => "rotate_back",
            Stage::Scale => "scale",
            Stage::Update => "update",
        }
    }
}

pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn lit(x: f64) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// Tags the operations that follow; a no-op for plain floats.
    #[inline(always)]
    fn stage(_: Stage) {}
}

impl Scalar for f64 {
    #[inline(always)]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline(always)]
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Abs,
}

#[derive(Default)]
struct Tally {
    stage: Option<Stage>,
    ops: BTreeMap<(Stage, OpKind), u64>,
}

thread_local! {
    static TALLY: RefCell<Tally> = RefCell::new(Tally::default());
}

fn record(kind: OpKind) {
    TALLY.with(|t| {
        let mut t = t.borrow_mut();
        let stage = t.stage.expect("operation outside a tagged stage");
        *t.ops.entry((stage, kind)).or_default() += 1;
    });
}

/// `f64` that records every arithmetic operation applied to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counted(pub f64);

impl Counted {
    /// Runs `f` with a fresh tally and returns the operations it performed.
    pub fn tally<R>(f: impl FnOnce() -> R) -> (R, BTreeMap<(Stage, OpKind), u64>) {
        TALLY.with(|t| *t.borrow_mut() = Tally::default());
        let r = f();
        let ops = TALLY.with(|t| std::mem::take(&mut t.borrow_mut().ops));
        (r, ops)
    }
}

macro_rules! counted_op {
    ($tr:ident, $m:ident, $kind:ident, $op:tt) => {
        impl $tr for Counted {
            type Output = Counted;
            fn $m(self, rhs: Counted) -> Counted {
                record(OpKind::$kind);
                Counted(self.0 $op rhs.0)
            }
        }
    };
}

counted_op!(Add, add, Add, +);
counted_op!(Sub, sub, Sub, -);
counted_op!(Mul, mul, Mul, *);
counted_op!(Div, div, Div, /);

impl Scalar for Counted {
    fn lit(x: f64) -> Self {
        Counted(x)
    }
    fn sqrt(self) -> Self {
        record(OpKind::Sqrt);
        Counted(self.0.sqrt())
    }
    fn abs(self) -> Self {
        record(OpKind::Abs);
        Counted(self.0.abs())
    }
    fn stage(s: Stage) {
        TALLY.with(|t| t.borrow_mut().stage = Some(s));
    }
}

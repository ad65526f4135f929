//! Syntax trees for documents, kept close to the source text so a document
//! can be printed back.

use imp_core::kernelcat::{Rational, SetExpr};

use crate::error::Pos;

/// A reference to another declaration by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ref {
    pub name: String,
    pub pos: Pos,
}

impl Ref {
    pub fn new(name: impl Into<String>) -> Ref {
        Ref {
            name: name.into(),
            pos: Pos::default(),
        }
    }
}

/// A set written inline in braces or built from named sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetRef {
    Literal(Vec<String>),
    Expr(SetExpr),
}

/// `a -> b` entries in source order.
pub type Table = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclBody {
    Set(SetRef),
    Fn {
        dom: SetRef,
        cod: SetRef,
        table: Table,
    },
    System {
        states: SetRef,
        inputs: SetRef,
        update: Table,
    },
    Map {
        source: Ref,
        target: Ref,
        states: Table,
        inputs: Option<Table>,
    },
    RelKernel {
        dom: SetRef,
        cod: SetRef,
        rows: Vec<(String, Vec<String>)>,
    },
    StochKernel {
        dom: SetRef,
        cod: SetRef,
        rows: Vec<(String, Vec<(String, Rational)>)>,
    },
    Problem {
        env: Ref,
        plant: Ref,
        controller: Ref,
        targets: Vec<String>,
        attractor: Option<Vec<String>>,
    },
    Reasoner {
        params: SetRef,
        observations: SetRef,
        hidden: SetRef,
        update: Ref,
        interpretation: Ref,
        model: Ref,
    },
}

/// Declaration namespaces. Relation and stochastic kernels share one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeclKind {
    Set,
    Fn,
    System,
    Map,
    Kernel,
    Problem,
    Reasoner,
}

impl DeclKind {
    pub fn noun(self) -> &'static str {
        match self {
            DeclKind::Set => "set",
            DeclKind::Fn => "function",
            DeclKind::System => "system",
            DeclKind::Map => "map",
            DeclKind::Kernel => "kernel",
            DeclKind::Problem => "problem",
            DeclKind::Reasoner => "reasoner",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub pos: Pos,
    pub body: DeclBody,
}

impl Decl {
    pub fn new(name: impl Into<String>, body: DeclBody) -> Decl {
        Decl {
            name: name.into(),
            pos: Pos::default(),
            body,
        }
    }

    pub fn kind(&self) -> DeclKind {
        match self.body {
            DeclBody::Set(_) => DeclKind::Set,
            DeclBody::Fn { .. } => DeclKind::Fn,
            DeclBody::System { .. } => DeclKind::System,
            DeclBody::Map { .. } => DeclKind::Map,
            DeclBody::RelKernel { .. } | DeclBody::StochKernel { .. } => DeclKind::Kernel,
            DeclBody::Problem { .. } => DeclKind::Problem,
            DeclBody::Reasoner { .. } => DeclKind::Reasoner,
        }
    }
}

//! Carrier values.
//!
//! Every carrier holds explicit payload values plus the canonical undefined
//! element [`Element::Top`]. Display output doubles as the canonical literal
//! used in reports: `top`, `own`, `ownbar`, `3`, `{1↦wait, 2↦serve}`, `(a, b)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

/// Ownership values of the exclusive-ownership PCM. `Ownbar` is the unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ownership {
    Own,
    Ownbar,
}

/// Ticket labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Wait,
    Serve,
    Used,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Wait, Label::Serve, Label::Used];
}

/// Lock history operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HistOp {
    L,
    U,
}

impl HistOp {
    pub const ALL: [HistOp; 2] = [HistOp::L, HistOp::U];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Own(Ownership),
    Nat(u32),
    Label(Label),
    Op(HistOp),
    Map(BTreeMap<u32, Value>),
    Pair(Box<Element>, Box<Element>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Val(Value),
    Top,
}

impl Element {
    pub fn own() -> Self {
        Element::Val(Value::Own(Ownership::Own))
    }

    pub fn ownbar() -> Self {
        Element::Val(Value::Own(Ownership::Ownbar))
    }

    pub fn nat(n: u32) -> Self {
        Element::Val(Value::Nat(n))
    }

    pub fn empty_map() -> Self {
        Element::Val(Value::Map(BTreeMap::new()))
    }

    /// Builds a map element from `(key, value)` entries.
    pub fn map<I, V>(entries: I) -> Self
    where
        I: IntoIterator<Item = (u32, V)>,
        V: Into<Value>,
    {
        Element::Val(Value::Map(
            entries.into_iter().map(|(k, v)| (k, v.into())).collect(),
        ))
    }

    /// Pairs two elements. The pair of two tops is the product's own top.
    pub fn pair(a: Element, b: Element) -> Self {
        if a.is_top() && b.is_top() {
            Element::Top
        } else {
            Element::Val(Value::Pair(Box::new(a), Box::new(b)))
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Element::Top)
    }

    pub fn as_map(&self) -> Option<&BTreeMap<u32, Value>> {
        match self {
            Element::Val(Value::Map(m)) => Some(m),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u32> {
        match self {
            Element::Val(Value::Nat(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn as_ownership(&self) -> Option<Ownership> {
        match self {
            Element::Val(Value::Own(o)) => Some(*o),
            _ => None,
        }
    }

    /// Splits a pair into its components; the product top splits into two tops.
    pub fn as_pair(&self) -> Option<(&Element, &Element)> {
        match self {
            Element::Val(Value::Pair(a, b)) => Some((a, b)),
            Element::Top => Some((&Element::Top, &Element::Top)),
            _ => None,
        }
    }
}

impl From<Label> for Value {
    fn from(l: Label) -> Self {
        Value::Label(l)
    }
}

impl From<HistOp> for Value {
    fn from(op: HistOp) -> Self {
        Value::Op(op)
    }
}

impl From<Value> for Element {
    fn from(v: Value) -> Self {
        Element::Val(v)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Wait => "wait",
            Label::Serve => "serve",
            Label::Used => "used",
        })
    }
}

impl fmt::Display for HistOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HistOp::L => "L",
            HistOp::U => "U",
        })
    }
}

impl fmt::Display for Ownership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ownership::Own => "own",
            Ownership::Ownbar => "ownbar",
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Own(o) => o.fmt(f),
            Value::Nat(n) => n.fmt(f),
            Value::Label(l) => l.fmt(f),
            Value::Op(op) => op.fmt(f),
            Value::Map(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}↦{v}")?;
                }
                f.write_str("}")
            }
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Top => f.write_str("top"),
            Element::Val(v) => v.fmt(f),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Renders a witness tuple as `(a, b, c)`.
pub fn show_tuple(elems: &[Element]) -> String {
    let parts: Vec<String> = elems.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

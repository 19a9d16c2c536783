//! Partial transcripts: the objects an observer can hold.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::group::Scalar;
use crate::protocol::Transcript;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("shape {target} is not contained in {source_shape}")]
    NotASubshape { source_shape: ViewShape, target: ViewShape },
    #[error("unknown transcript component {0:?}")]
    UnknownComponent(String),
}

/// A subset of `{a, e, z}`, stored as a bitmask (a = 1, e = 2, z = 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ViewShape(u8);

impl ViewShape {
    pub const EMPTY: ViewShape = ViewShape(0);
    pub const A: ViewShape = ViewShape(1);
    pub const E: ViewShape = ViewShape(2);
    pub const Z: ViewShape = ViewShape(4);
    pub const AE: ViewShape = ViewShape(3);
    pub const AZ: ViewShape = ViewShape(5);
    pub const EZ: ViewShape = ViewShape(6);
    pub const FULL: ViewShape = ViewShape(7);

    pub fn all() -> impl Iterator<Item = ViewShape> {
        (0..8).map(ViewShape)
    }

    pub fn has_a(self) -> bool {
        self.0 & 1 != 0
    }

    pub fn has_e(self) -> bool {
        self.0 & 2 != 0
    }

    pub fn has_z(self) -> bool {
        self.0 & 4 != 0
    }

    pub fn is_subset_of(self, other: ViewShape) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ViewShape) -> ViewShape {
        ViewShape(self.0 | other.0)
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for ViewShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.has_a() {
            parts.push("a");
        }
        if self.has_e() {
            parts.push("e");
        }
        if self.has_z() {
            parts.push("z");
        }
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for ViewShape {
    type Err = ViewError;

    /// Accepts `a,e,z`, `{a,z}`, `{}` and the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut bits = 0u8;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            bits |= match part {
                "a" => 1,
                "e" => 2,
                "z" => 4,
                other => return Err(ViewError::UnknownComponent(other.to_string())),
            };
        }
        Ok(ViewShape(bits))
    }
}

/// A partial transcript. Ordered by shape, then by values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ViewObject<C> {
    pub a: Option<C>,
    pub e: Option<Scalar>,
    pub z: Option<Scalar>,
}

impl<C: Copy + Eq> ViewObject<C> {
    pub const EMPTY: ViewObject<C> = ViewObject { a: None, e: None, z: None };

    pub fn full(t: &Transcript<C>) -> Self {
        ViewObject { a: Some(t.a), e: Some(t.e), z: Some(t.z) }
    }

    pub fn commitment(a: C) -> Self {
        ViewObject { a: Some(a), e: None, z: None }
    }

    pub fn shape(&self) -> ViewShape {
        let mut bits = 0;
        if self.a.is_some() {
            bits |= 1;
        }
        if self.e.is_some() {
            bits |= 2;
        }
        if self.z.is_some() {
            bits |= 4;
        }
        ViewShape(bits)
    }

    /// Forgets every component outside `shape`, without checking containment.
    pub fn project(&self, shape: ViewShape) -> Self {
        ViewObject {
            a: self.a.filter(|_| shape.has_a()),
            e: self.e.filter(|_| shape.has_e()),
            z: self.z.filter(|_| shape.has_z()),
        }
    }

    /// The view of `t` restricted to `shape`.
    pub fn of_transcript(t: &Transcript<C>, shape: ViewShape) -> Self {
        Self::full(t).project(shape)
    }

    /// True when `t` agrees with every revealed component.
    pub fn matches(&self, t: &Transcript<C>) -> bool {
        self.a.is_none_or(|a| a == t.a) && self.e.is_none_or(|e| e == t.e) && self.z.is_none_or(|z| z == t.z)
    }

    /// True when `self` reveals at least what `other` does and agrees with it,
    /// i.e. there is an erasure `self -> other`.
    pub fn refines(&self, other: &Self) -> bool {
        other.shape().is_subset_of(self.shape()) && self.project(other.shape()) == *other
    }

    /// Least common refinement of two views, if they agree where both reveal.
    pub fn merge(&self, other: &Self) -> Option<Self> {
        fn pick<T: Copy + Eq>(x: Option<T>, y: Option<T>) -> Option<Option<T>> {
            match (x, y) {
                (Some(u), Some(v)) if u != v => None,
                (Some(u), _) => Some(Some(u)),
                (None, v) => Some(v),
            }
        }
        Some(ViewObject { a: pick(self.a, other.a)?, e: pick(self.e, other.e)?, z: pick(self.z, other.z)? })
    }

    pub fn to_full_transcript(&self) -> Option<Transcript<C>> {
        Some(Transcript { a: self.a?, e: self.e?, z: self.z? })
    }
}

impl<C: Copy + Ord> PartialOrd for ViewObject<C> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Copy + Ord> Ord for ViewObject<C> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let shape = |v: &Self| {
            (v.a.is_some() as u8) | ((v.e.is_some() as u8) << 1) | ((v.z.is_some() as u8) << 2)
        };
        (shape(self), self.a, self.e, self.z).cmp(&(shape(other), other.a, other.e, other.z))
    }
}

impl<C: fmt::Display + Copy + Eq> fmt::Display for ViewObject<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(a) = self.a {
            parts.push(format!("a={a}"));
        }
        if let Some(e) = self.e {
            parts.push(format!("e={e}"));
        }
        if let Some(z) = self.z {
            parts.push(format!("z={z}"));
        }
        write!(f, "({})", parts.join(" "))
    }
}

/// An erasure map. The category is thin, so a morphism is just its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ViewMorphism<C> {
    pub source: ViewObject<C>,
    pub target: ViewObject<C>,
}

impl<C: Copy + Eq> ViewMorphism<C> {
    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    /// `self` followed by `next`; `None` if the endpoints do not line up.
    pub fn then(&self, next: &Self) -> Option<Self> {
        (self.target == next.source).then_some(ViewMorphism { source: self.source, target: next.target })
    }
}

/// The unique morphism forgetting everything outside `target_shape`.
pub fn erasure<C: Copy + Eq>(view: &ViewObject<C>, target_shape: ViewShape) -> Result<ViewMorphism<C>, ViewError> {
    if !target_shape.is_subset_of(view.shape()) {
        return Err(ViewError::NotASubshape { source_shape: view.shape(), target: target_shape });
    }
    Ok(ViewMorphism { source: *view, target: view.project(target_shape) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;
    use proptest::prelude::*;

    fn sc(v: u64) -> Scalar {
        GroupParams::new(23, 11, 2).unwrap().scalar(v).unwrap()
    }

    fn full(a: u64, e: u64, z: u64) -> ViewObject<u64> {
        ViewObject { a: Some(a), e: Some(sc(e)), z: Some(sc(z)) }
    }

    #[test]
    fn erasure_examples() {
        let v = full(9, 4, 6);
        let m = erasure(&v, ViewShape::AE).unwrap();
        assert_eq!(m.target, ViewObject { a: Some(9), e: Some(sc(4)), z: None });
        assert!(erasure(&v, v.shape()).unwrap().is_identity());
        let m2 = erasure(&m.target, ViewShape::E).unwrap();
        assert_eq!(m2.target, ViewObject { a: None, e: Some(sc(4)), z: None });
        assert!(matches!(erasure(&m.target, ViewShape::Z), Err(ViewError::NotASubshape { .. })));
    }

    #[test]
    fn shape_parsing() {
        assert_eq!("a,e,z".parse::<ViewShape>().unwrap(), ViewShape::FULL);
        assert_eq!("{a,z}".parse::<ViewShape>().unwrap(), ViewShape::AZ);
        assert_eq!("".parse::<ViewShape>().unwrap(), ViewShape::EMPTY);
        assert_eq!(ViewShape::EZ.to_string(), "{e,z}");
        assert!("a,x".parse::<ViewShape>().is_err());
    }

    #[test]
    fn merge_and_refines() {
        let ae = full(9, 4, 6).project(ViewShape::AE);
        let az = full(9, 4, 6).project(ViewShape::AZ);
        assert_eq!(ae.merge(&az), Some(full(9, 4, 6)));
        let other = full(9, 5, 6).project(ViewShape::AE);
        assert_eq!(ae.merge(&other), None);
        assert!(full(9, 4, 6).refines(&ae));
        assert!(!ae.refines(&full(9, 4, 6)));
    }

    proptest! {
        #[test]
        fn erasure_composes(a in 0u64..5, e in 0u64..11, z in 0u64..11, s1 in 0u8..8, s2 in 0u8..8) {
            let v = full(a, e, z);
            let (s1, s2) = (ViewShape(s1 & s2), ViewShape(s2));
            let step = erasure(&v, s2).unwrap().then(&erasure(&v.project(s2), s1).unwrap()).unwrap();
            prop_assert_eq!(step, erasure(&v, s1).unwrap());
        }
    }
}

//! Planner covers and their serialized form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{product, DigitalImage};
use crate::spaces::Space;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverKind {
    Cat,
    Tc,
}

impl CoverKind {
    pub fn invariant(self) -> &'static str {
        match self {
            CoverKind::Cat => "d-cat",
            CoverKind::Tc => "d-TC",
        }
    }
}

/// Contracting frames (cat) or one path per member (TC).
///
/// `Frames(f)`: `f[t][k]` is the image of member `k` at time `t`.
/// `Sections(s)`: `s[k]` is the path assigned to member `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Frames(Vec<Vec<usize>>),
    Sections(Vec<Vec<usize>>),
}

/// A sphere-level evaluation of a construction for one representative input.
///
/// `pattern` holds the upstairs representative(s) the formula was evaluated on
/// (`[u]` for cat, `[u, v]` for TC); `steps` is the resulting upstairs path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub member: usize,
    pub pattern: Vec<usize>,
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPiece {
    pub label: String,
    pub members: Vec<usize>,
    pub witness: Witness,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lifts: Vec<Lift>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

/// How lifts relate to the covered space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftMode {
    /// No sphere-level evaluations are recorded.
    None,
    /// The space is a sphere; lifts live on the space itself.
    Identity,
    /// The space is an antipodal quotient; lifts live on the sphere product.
    Quotient,
}

/// Upstairs image and class projection used to check lifts.
#[derive(Clone, Debug)]
pub struct LiftContext {
    pub upstairs: Arc<DigitalImage>,
    pub class_of: Vec<usize>,
}

/// The images a cover refers to.
#[derive(Clone, Debug)]
pub struct CoverContext {
    /// The space `X`.
    pub space: Arc<DigitalImage>,
    /// `X` for cat covers, `X × X` for TC covers.
    pub base: Arc<DigitalImage>,
    pub lift: Option<LiftContext>,
}

impl CoverContext {
    /// Rebuilds the images for a named space.
    pub fn for_space(space: &Space, kind: CoverKind, mode: LiftMode) -> Result<Self> {
        let built = space.build()?;
        let x = Arc::clone(&built.image);
        let base = match kind {
            CoverKind::Cat => Arc::clone(&x),
            CoverKind::Tc => Arc::new(product(&x, &x)),
        };
        let lift = match mode {
            LiftMode::None => None,
            LiftMode::Identity => {
                if built.sphere.is_none() {
                    return Err(Error::Document("identity lifts need a sphere".into()));
                }
                Some(LiftContext {
                    upstairs: Arc::clone(&x),
                    class_of: (0..x.len()).collect(),
                })
            }
            LiftMode::Quotient => {
                let q = built
                    .quotient
                    .as_ref()
                    .ok_or_else(|| Error::Document("quotient lifts need a quotient space".into()))?;
                Some(LiftContext {
                    upstairs: Arc::clone(q.base()),
                    class_of: (0..q.base().len()).map(|i| q.class_of(i)).collect(),
                })
            }
        };
        Ok(CoverContext { space: x, base, lift })
    }
}

/// An ordered list of cover pieces with their witnesses.
#[derive(Clone, Debug)]
pub struct PlannerCover {
    pub space: String,
    pub kind: CoverKind,
    pub lift_mode: LiftMode,
    pub pieces: Vec<CoverPiece>,
    pub provenance: Provenance,
    pub context: CoverContext,
}

impl PlannerCover {
    /// `pieces - 1`.
    pub fn bound(&self) -> usize {
        self.pieces.len().saturating_sub(1)
    }

    pub fn to_doc(&self) -> CoverDoc {
        CoverDoc {
            base: self.space.clone(),
            kind: self.kind,
            lifts: self.lift_mode,
            bound: self.bound(),
            pieces: self.pieces.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// JSON form of a [`PlannerCover`]; `base` names the covered space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDoc {
    pub base: String,
    pub kind: CoverKind,
    pub lifts: LiftMode,
    pub bound: usize,
    pub pieces: Vec<CoverPiece>,
    pub provenance: Provenance,
}

impl CoverDoc {
    pub fn into_cover(self) -> Result<PlannerCover> {
        let space: Space = self.base.parse()?;
        let context = CoverContext::for_space(&space, self.kind, self.lifts)?;
        Ok(PlannerCover {
            space: space.to_string(),
            kind: self.kind,
            lift_mode: self.lifts,
            pieces: self.pieces,
            provenance: self.provenance,
            context,
        })
    }
}

/// A checked record `invariant(space) <= bound`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCertificate {
    pub space: String,
    pub invariant: String,
    pub bound: usize,
    pub verified: bool,
    pub report: crate::verify::Report,
    pub cover: CoverDoc,
}

//! Explicit covers: categorical covers with contracting homotopies and motion
//! planners with sections, plus search-backed covers for small spaces.

pub mod cat;
pub mod cover;
pub mod family;
pub mod tc;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use cat::{cat_cover, cat_piece_index, default_families, Schedule};
pub use cover::{
    BoundCertificate, CoverContext, CoverDoc, CoverKind, CoverPiece, Lift, LiftContext, LiftMode, PlannerCover,
    Provenance, Witness,
};
pub use family::{default_path_family, PathFamily};
pub use tc::{doubled_cat_cover, tc_planner_pps, tc_planner_projective, tc_planner_sphere};

use crate::error::{Error, Result};
use crate::homotopy::{admits_section, inclusion_nullhomotopic, Decision};
use crate::image::product;
use crate::spaces::{theta_for, BuiltSpace, NonSingularMap, Space};

/// Options for [`plan`].
#[derive(Clone, Debug)]
pub struct PlanOptions {
    pub theta: Option<NonSingularMap>,
    pub doubled: bool,
    pub schedule: Schedule,
    pub budget: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            theta: None,
            doubled: false,
            schedule: Schedule::default(),
            budget: crate::homotopy::DEFAULT_BUDGET,
        }
    }
}

/// One contracted piece per connected component, witnesses found by search.
pub fn search_cat_cover(built: &BuiltSpace, budget: usize) -> Result<PlannerCover> {
    let x = &built.image;
    let comps = x.components();
    let count = comps.iter().max().map_or(0, |m| m + 1);
    let mut pieces = Vec::with_capacity(count);
    for c in 0..count {
        let members: Vec<usize> = (0..x.len()).filter(|&i| comps[i] == c).collect();
        let frames = match inclusion_nullhomotopic(x, &members, budget)? {
            Decision::Yes((w, _)) => w.frames,
            other => {
                return Err(Error::Construction(format!(
                    "component {c} contraction search: {}",
                    other.label()
                )))
            }
        };
        pieces.push(CoverPiece {
            label: format!("C_{c}"),
            members,
            witness: Witness::Frames(frames),
            lifts: Vec::new(),
        });
    }
    Ok(PlannerCover {
        space: built.space.to_string(),
        kind: CoverKind::Cat,
        lift_mode: LiftMode::None,
        pieces,
        provenance: search_provenance("search_cat_cover", budget),
        context: CoverContext {
            space: Arc::clone(x),
            base: Arc::clone(x),
            lift: None,
        },
    })
}

/// A single-piece planner on all of `X × X`, found by search.
pub fn search_tc_cover(built: &BuiltSpace, budget: usize) -> Result<PlannerCover> {
    let x = &built.image;
    let base = Arc::new(product(x, x));
    let members: Vec<usize> = (0..base.len()).collect();
    let paths = match admits_section(x, &base, &members, budget)? {
        Decision::Yes(paths) => paths,
        other => {
            return Err(Error::Construction(format!(
                "no single-piece motion planner ({})",
                other.label()
            )))
        }
    };
    Ok(PlannerCover {
        space: built.space.to_string(),
        kind: CoverKind::Tc,
        lift_mode: LiftMode::None,
        pieces: vec![CoverPiece {
            label: "W_0".to_string(),
            members,
            witness: Witness::Sections(paths.iter().map(|p| p.steps().to_vec()).collect()),
            lifts: Vec::new(),
        }],
        provenance: search_provenance("search_tc_cover", budget),
        context: CoverContext {
            space: Arc::clone(x),
            base,
            lift: None,
        },
    })
}

fn search_provenance(name: &str, budget: usize) -> Provenance {
    let mut parameters = BTreeMap::new();
    parameters.insert("budget".to_string(), budget.to_string());
    Provenance {
        construction: name.to_string(),
        parameters,
    }
}

/// Builds the cover of the requested kind for a named space.
///
/// Projective (product) spaces use the explicit constructions, spheres of
/// positive dimension use the sphere planner for TC, and every other case
/// falls back to search.
pub fn plan(space: &Space, kind: CoverKind, opts: &PlanOptions) -> Result<PlannerCover> {
    let built = space.build()?;
    let mut cover = match (kind, space) {
        (CoverKind::Cat, Space::Proj(_) | Space::Pps(_)) => {
            let model = built.pps.as_ref().expect("projective spaces carry a model");
            cat_cover(model, &default_families(model)?, opts.schedule)?
        }
        (CoverKind::Cat, _) => search_cat_cover(&built, opts.budget)?,
        (CoverKind::Tc, _) if opts.doubled => {
            let cat = plan(space, CoverKind::Cat, &PlanOptions { doubled: false, ..opts.clone() })?;
            doubled_cat_cover(&cat)?
        }
        (CoverKind::Tc, Space::Proj(_) | Space::Pps(_)) => {
            let model = built.pps.as_ref().expect("projective spaces carry a model");
            let theta = match &opts.theta {
                Some(t) => t.clone(),
                None => theta_for(model.spheres()[0].n())?,
            };
            let families = default_families(model)?;
            if matches!(space, Space::Proj(_)) {
                tc_planner_projective(model, &theta, &families[0])?
            } else {
                tc_planner_pps(model, &theta, &families)?
            }
        }
        (CoverKind::Tc, Space::Sphere(n)) if *n >= 1 => tc_planner_sphere(&default_path_family(*n)?)?,
        (CoverKind::Tc, _) => search_tc_cover(&built, opts.budget)?,
    };
    cover.space = space.to_string();
    Ok(cover)
}

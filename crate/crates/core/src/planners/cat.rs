//! The LS-category cover of `d-P_n̄` by `n_1 + r` categorical pieces.
//!
//! Pieces at sphere level, for `ū = (u_1, …, u_r)` with `u_q` a vertex of
//! `S^{n_q}_min` and the pole of sphere `q` on its last axis:
//! * `U_i`, `i < n_1`: `u_1 = ±e_i` and no coordinate is a pole;
//! * `U_{n_1-1+k}`, `1 <= k < r`: exactly `k` coordinates are poles;
//! * `U_{n_1+r-1}`: every coordinate is a pole.
//!
//! Each piece contracts to the class of a tuple of north poles (with `e_i` in
//! the first slot for `i < n_1`). In the pole pieces the tuple is first
//! normalized by the sign of its first pole; poles that are then southern travel
//! along `σ_0`, and non-pole coordinates rotate onto their north pole.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::planners::cover::{
    CoverContext, CoverKind, CoverPiece, LiftContext, LiftMode, Lift, PlannerCover, Provenance, Witness,
};
use crate::planners::family::{pad, PathFamily};
use crate::spaces::PpsModel;

/// When the meridian corrections run relative to the rotation phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// `σ_0` runs on `[0, m_2]` alongside the rotations.
    #[default]
    Overlapped,
    /// Rotations on `[0, m_1]`, then `σ_0` on `[m_1, m_1 + m_2]`.
    Sequential,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Overlapped => "overlapped",
            Schedule::Sequential => "sequential",
        }
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlapped" => Ok(Schedule::Overlapped),
            "sequential" => Ok(Schedule::Sequential),
            _ => Err(Error::Parse(format!("unknown schedule `{s}`"))),
        }
    }
}

pub(crate) fn check_families(model: &PpsModel, families: &[PathFamily]) -> Result<()> {
    let dims: Vec<usize> = model.spheres().iter().map(|s| s.n()).collect();
    let fam: Vec<usize> = families.iter().map(PathFamily::n).collect();
    if dims != fam {
        return Err(Error::Construction(format!(
            "path families for spheres {fam:?} do not match {dims:?}"
        )));
    }
    Ok(())
}

/// Default families, one per sphere factor.
pub fn default_families(model: &PpsModel) -> Result<Vec<PathFamily>> {
    model
        .spheres()
        .iter()
        .map(|s| crate::planners::family::default_path_family(s.n()))
        .collect()
}

/// Index of the cover piece containing the sphere-level tuple `coords`.
pub fn cat_piece_index(model: &PpsModel, coords: &[usize]) -> usize {
    let spheres = model.spheres();
    let poles = coords
        .iter()
        .zip(spheres)
        .filter(|(&c, s)| s.is_pole(c))
        .count();
    let n1 = spheres[0].n();
    if poles == 0 {
        spheres[0].vertex(coords[0]).axis
    } else {
        n1 - 1 + poles
    }
}

/// The contracting trajectory of one sphere-level tuple, as upstairs indices.
fn trajectory(
    model: &PpsModel,
    families: &[PathFamily],
    schedule: Schedule,
    coords: &[usize],
    total: usize,
) -> Result<Vec<usize>> {
    let spheres = model.spheres();
    let is_pole: Vec<bool> = coords.iter().zip(spheres).map(|(&c, s)| s.is_pole(c)).collect();
    let mut paths = Vec::with_capacity(coords.len());
    match is_pole.iter().position(|&p| p) {
        None => {
            let north = spheres[0].vertex(coords[0]).positive;
            paths.push(vec![coords[0]]);
            for q in 1..coords.len() {
                paths.push(families[q].rho(coords[q], spheres[q].pole(north))?);
            }
        }
        Some(j0) => {
            let flip = !spheres[j0].vertex(coords[j0]).positive;
            for q in 0..coords.len() {
                let s = &spheres[q];
                let w = if flip { s.antipode(coords[q]) } else { coords[q] };
                let path = if !is_pole[q] {
                    families[q].rho(w, s.pole(true))?
                } else if w == s.pole(true) {
                    vec![w]
                } else {
                    let meridian = families[q].sigma0();
                    match schedule {
                        Schedule::Overlapped => meridian,
                        Schedule::Sequential => {
                            let mut p = vec![w; families[q].m1];
                            p.extend(meridian);
                            p
                        }
                    }
                };
                paths.push(path);
            }
        }
    }
    let padded: Vec<Vec<usize>> = paths.into_iter().map(|p| pad(p, total)).collect();
    Ok((0..=total)
        .map(|t| {
            let tuple: Vec<usize> = padded.iter().map(|p| p[t]).collect();
            model.encode(&tuple)
        })
        .collect())
}

/// The `n_1 + r` piece categorical cover with its contracting homotopies.
pub fn cat_cover(model: &PpsModel, families: &[PathFamily], schedule: Schedule) -> Result<PlannerCover> {
    check_families(model, families)?;
    for f in families {
        f.validate()?;
    }
    let total = families.iter().map(PathFamily::total).max().unwrap_or(0);
    let q = model.quotient();
    let upstairs = model.sphere_product();
    let count = model.spec().cat_bound() + 1;

    let mut pieces: Vec<CoverPiece> = (0..count)
        .map(|i| CoverPiece {
            label: format!("U_{i}"),
            members: Vec::new(),
            witness: Witness::Frames(Vec::new()),
            lifts: Vec::new(),
        })
        .collect();
    let mut traces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); count];
    for class in 0..q.len() {
        let reps = q.classes()[class];
        let piece = cat_piece_index(model, &model.decode(reps[0]));
        if cat_piece_index(model, &model.decode(reps[1])) != piece {
            return Err(Error::Construction(format!("class {class} straddles two pieces")));
        }
        let member = pieces[piece].members.len();
        let mut projected: Option<Vec<usize>> = None;
        for &rep in &reps {
            let mut steps = trajectory(model, families, schedule, &model.decode(rep), total)?;
            if steps[0] != rep {
                // the trajectory ran from the antipode; negate it to start at `rep`
                steps = steps.iter().map(|&p| q.antipode(p)).collect();
            }
            let proj: Vec<usize> = steps.iter().map(|&p| q.class_of(p)).collect();
            if projected.as_ref().is_some_and(|prev| *prev != proj) {
                return Err(Error::Construction(format!(
                    "the two representatives of class {class} contract to different class paths"
                )));
            }
            projected = Some(proj);
            pieces[piece].lifts.push(Lift {
                member,
                pattern: vec![rep],
                steps,
            });
        }
        pieces[piece].members.push(class);
        traces[piece].push(projected.expect("classes have two representatives"));
    }
    for (piece, trace) in pieces.iter_mut().zip(traces) {
        let frames = (0..=total)
            .map(|t| trace.iter().map(|path| path[t]).collect())
            .collect();
        piece.witness = Witness::Frames(frames);
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("nbar".to_string(), model.spec().to_string());
    parameters.insert("schedule".to_string(), schedule.name().to_string());
    parameters.insert("m1".to_string(), families[0].m1.to_string());
    parameters.insert("m2".to_string(), families[0].m2.to_string());
    Ok(PlannerCover {
        space: format!("pps:{}", model.spec()),
        kind: CoverKind::Cat,
        lift_mode: LiftMode::Quotient,
        pieces,
        provenance: Provenance {
            construction: "cat_cover".to_string(),
            parameters,
        },
        context: CoverContext {
            space: Arc::clone(q.image()),
            base: Arc::clone(q.image()),
            lift: Some(LiftContext {
                upstairs: Arc::clone(upstairs),
                class_of: (0..upstairs.len()).map(|i| q.class_of(i)).collect(),
            }),
        },
    })
}

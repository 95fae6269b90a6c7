//! JSON instance and solution files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    round_sig10, ClassTag, DistanceSource, Geometry, Instance, InstanceError, Ring, Solution,
};

/// On-disk form of an [`Instance`]. Either coordinates (`customers`,
/// `depots`) or full `routing`/`assignment` matrices are present. Vertices
/// are numbered customers first, then depots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub name: String,
    pub class: ClassTag,
    #[serde(default)]
    pub alpha: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub distance_source: DistanceSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub customers: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depots: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_customers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_depots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<Vec<f64>>>,
}

fn round_points(p: &[[f64; 2]]) -> Vec<[f64; 2]> {
    p.iter().map(|q| [round_sig10(q[0]), round_sig10(q[1])]).collect()
}

impl Instance {
    pub fn to_file(&self) -> InstanceFile {
        let mut f = InstanceFile {
            name: self.name.clone(),
            class: self.class,
            alpha: self.alpha,
            seed: self.seed,
            distance_source: self.source,
            customers: None,
            depots: None,
            n_customers: None,
            n_depots: None,
            routing: None,
            assignment: None,
        };
        match &self.geometry {
            Some(g) => {
                f.customers = Some(round_points(&g.customers));
                f.depots = Some(round_points(&g.depots));
            }
            None => {
                let nv = self.n_vertices();
                let mat = |flat: &[f64]| -> Vec<Vec<f64>> {
                    flat.chunks(nv)
                        .map(|r| r.iter().map(|&v| round_sig10(v)).collect())
                        .collect()
                };
                f.n_customers = Some(self.n_customers());
                f.n_depots = Some(self.n_depots());
                f.routing = Some(mat(&self.routing));
                f.assignment = Some(mat(&self.assignment));
            }
        }
        f
    }

    pub fn from_file(f: InstanceFile) -> Result<Instance, InstanceError> {
        match (f.customers, f.depots, f.routing, f.assignment) {
            (Some(customers), Some(depots), None, None) => Instance::from_geometry(
                f.name,
                Geometry { customers, depots },
                f.class,
                f.alpha,
                f.seed,
                f.distance_source,
            ),
            (None, None, Some(routing), Some(assignment)) => {
                let u = f
                    .n_customers
                    .ok_or(InstanceError::MissingField("n_customers"))?;
                let n = f.n_depots.ok_or(InstanceError::MissingField("n_depots"))?;
                let mut inst = Instance::from_matrices(f.name, u, n, routing, assignment)?;
                inst.class = f.class;
                inst.alpha = f.alpha;
                inst.seed = f.seed;
                inst.source = f.distance_source;
                Ok(inst)
            }
            _ => Err(InstanceError::Invalid(
                "expected either customers+depots coordinates or routing+assignment matrices"
                    .into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        Instance::from_file(serde_json::from_str(text)?)
    }
}

/// On-disk form of a [`Solution`] with its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub cost: f64,
    pub rings: Vec<Ring>,
    pub assignments: BTreeMap<usize, usize>,
}

impl SolutionFile {
    pub fn new(inst: &Instance, sol: &Solution) -> Self {
        SolutionFile {
            cost: round_sig10(sol.cost(inst)),
            rings: sol.rings.clone(),
            assignments: sol.assignments.clone(),
        }
    }

    pub fn solution(&self) -> Solution {
        Solution {
            rings: self.rings.clone(),
            assignments: self.assignments.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }
}

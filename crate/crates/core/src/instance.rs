//! Problem instances: generation from a seed and the JSON file format
//!
//! ```json
//! {"m": 2, "A": [[1.0, 1.0], [0.0, 1.0]], "z": [0.0, 1.0], "label": "shear", "seed": 7}
//! ```
//!
//! `A` is row-major. Numbers are written with 17 significant digits so a
//! write/read cycle reproduces every `f64` exactly. `seed` is optional.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{check_finite, dot, lu_factor, norm2, Matrix};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `A = I + param·E`, `E` uniform in `[−1, 1]`.
    IdentityPerturbed,
    /// Standard normal entries.
    RandomNonsingular,
    /// `A = Q·(I + S)`, `Q` orthogonal, `S` diagonal, with `‖AᵀA − I‖ ≤ param`.
    GramDefectTargeted,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [
        GeneratorKind::IdentityPerturbed,
        GeneratorKind::RandomNonsingular,
        GeneratorKind::GramDefectTargeted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::IdentityPerturbed => "identity-perturbed",
            GeneratorKind::RandomNonsingular => "random-nonsingular",
            GeneratorKind::GramDefectTargeted => "gram-defect-targeted",
        }
    }

    /// Parameter used when none is given.
    pub fn default_param(self) -> f64 {
        match self {
            GeneratorKind::IdentityPerturbed => 0.3,
            GeneratorKind::RandomNonsingular => 0.0,
            GeneratorKind::GramDefectTargeted => 0.25,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::BadParam(format!("unknown generator kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub dimension: usize,
    pub generator: Matrix,
    pub point: Vec<f64>,
    pub label: String,
    pub seed: Option<u64>,
}

const MAX_ATTEMPTS: usize = 1000;

/// Generates a deterministic instance of the given kind.
pub fn generate(kind: GeneratorKind, m: usize, param: f64, seed: u64) -> Result<ProblemInstance> {
    if m == 0 {
        return Err(Error::BadParam("dimension must be at least 1".into()));
    }
    if !param.is_finite() {
        return Err(Error::BadParam(format!("parameter must be finite, got {param}")));
    }
    match kind {
        GeneratorKind::IdentityPerturbed if param < 0.0 => {
            return Err(Error::BadParam(format!("perturbation size must be nonnegative, got {param}")));
        }
        GeneratorKind::GramDefectTargeted if !(param > 0.0 && param < 1.0 / 3.0) => {
            return Err(Error::BadParam(format!("target defect must lie in (0, 1/3), got {param}")));
        }
        _ => {}
    }

    let mut rng = SplitMix64::new(seed);
    let generator = (0..MAX_ATTEMPTS)
        .map(|_| match kind {
            GeneratorKind::IdentityPerturbed => {
                let e = rng.uniform_vec(m * m, -1.0, 1.0);
                let mut a = Matrix::new(m, m, e).expect("finite entries").scale(param);
                for i in 0..m {
                    a[(i, i)] += 1.0;
                }
                a
            }
            GeneratorKind::RandomNonsingular => Matrix::new(m, m, rng.normal_vec(m * m)).expect("finite entries"),
            GeneratorKind::GramDefectTargeted => gram_targeted(&mut rng, m, param),
        })
        .find(|a| lu_factor(a).is_ok())
        .ok_or_else(|| Error::BadParam(format!("no nonsingular {kind} matrix after {MAX_ATTEMPTS} draws")))?;

    if kind == GeneratorKind::GramDefectTargeted {
        let defect = SimplicialCone::new(generator.clone())?.gram_defect();
        assert!(defect < 1.0 / 3.0, "targeted generator produced defect {defect}");
    }

    let mut point = rng.normal_vec(m);
    let len = norm2(&point);
    let target = (m as f64).sqrt();
    if len > 0.0 {
        point.iter_mut().for_each(|v| *v *= target / len);
    }

    Ok(ProblemInstance {
        dimension: m,
        generator,
        point,
        label: format!("{kind}-m{m}-s{seed}"),
        seed: Some(seed),
    })
}

/// `Q·(I + S)` with `S_ii` uniform in `[−s, s]` and `(1 + s)² − 1 = target`,
/// so every `|(1 + S_ii)² − 1| ≤ target`.
fn gram_targeted(rng: &mut SplitMix64, m: usize, target: f64) -> Matrix {
    let q = orthogonal_factor(&Matrix::new(m, m, rng.normal_vec(m * m)).expect("finite entries"));
    let s = (1.0 + target).sqrt() - 1.0;
    let diag: Vec<f64> = (0..m).map(|_| 1.0 + rng.uniform_in(-s, s)).collect();
    q.matmul(&Matrix::from_diagonal(&diag))
}

/// Orthonormal basis of the column space by modified Gram–Schmidt with one
/// reorthogonalization pass. Columns that collapse are replaced by unit
/// vectors, which the caller's singularity check never sees in practice.
pub fn orthogonal_factor(a: &Matrix) -> Matrix {
    let n = a.ncols();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = a.column(j);
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= proj * bi);
            }
        }
        let len = norm2(&v);
        if len > 1e-12 {
            v.iter_mut().for_each(|vi| *vi /= len);
        } else {
            v = vec![0.0; a.nrows()];
            v[j] = 1.0;
        }
        basis.push(v);
    }
    Matrix::from_columns(&basis)
}

#[derive(Deserialize)]
struct InstanceFile {
    m: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    z: Vec<f64>,
    #[serde(default)]
    label: String,
    #[serde(default)]
    seed: Option<u64>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl ProblemInstance {
    pub fn new(generator: Matrix, point: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let inst = ProblemInstance {
            dimension: generator.nrows(),
            generator,
            point,
            label: label.into(),
            seed: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let m = self.dimension;
        if m == 0 {
            return Err(Error::Empty);
        }
        if self.generator.nrows() != m || self.generator.ncols() != m {
            return Err(Error::InstanceFormat(format!(
                "A is {}x{}, expected {m}x{m}",
                self.generator.nrows(),
                self.generator.ncols()
            )));
        }
        if self.point.len() != m {
            return Err(Error::InstanceFormat(format!("z has length {}, expected {m}", self.point.len())));
        }
        check_finite(&self.point)
    }

    /// The cone of this instance; fails with `SingularGenerator` for a
    /// singular `A`.
    pub fn cone(&self) -> Result<SimplicialCone> {
        SimplicialCone::new(self.generator.clone())
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write!(out, "{{\"m\": {}, \"A\": [", self.dimension).unwrap();
        for (i, row) in self.generator.rows().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            write!(out, "[{}]", cells.join(", ")).unwrap();
        }
        let z: Vec<String> = self.point.iter().map(|&v| fmt_f64(v)).collect();
        write!(
            out,
            "], \"z\": [{}], \"label\": {}",
            z.join(", "),
            serde_json::to_string(&self.label).expect("strings serialize")
        )
        .unwrap();
        if let Some(seed) = self.seed {
            write!(out, ", \"seed\": {seed}").unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// Parses and validates an instance document, including the
    /// nonsingularity of `A`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::InstanceFormat(e.to_string()))?;
        if file.a.len() != file.m {
            return Err(Error::InstanceFormat(format!("A has {} rows, expected {}", file.a.len(), file.m)));
        }
        let generator = Matrix::from_rows(&file.a).map_err(|e| match e {
            Error::DimensionMismatch { .. } => Error::InstanceFormat("rows of A differ in length".into()),
            other => other,
        })?;
        let inst = ProblemInstance {
            dimension: file.m,
            generator,
            point: file.z,
            label: file.label,
            seed: file.seed,
        };
        inst.validate()?;
        lu_factor(&inst.generator).map_err(|e| match e {
            Error::SingularMatrix { column, pivot, .. } => Error::SingularGenerator { column, pivot },
            other => other,
        })?;
        Ok(inst)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        ProblemInstance::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse() {
        for k in GeneratorKind::ALL {
            assert_eq!(k.as_str().parse::<GeneratorKind>().unwrap(), k);
        }
        assert!("bogus".parse::<GeneratorKind>().is_err());
    }

    #[test]
    fn targeted_defect_respects_param() {
        let inst = generate(GeneratorKind::GramDefectTargeted, 4, 0.2, 7).unwrap();
        let defect = inst.cone().unwrap().gram_defect();
        assert!(defect <= 0.2, "defect {defect}");
        assert!(defect > 0.0);
        assert!((norm2(&inst.point) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_identity() {
        let inst = generate(GeneratorKind::IdentityPerturbed, 1, 0.0, 11).unwrap();
        assert_eq!(inst.generator, Matrix::identity(1));
        assert!((inst.point[0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = generate(GeneratorKind::RandomNonsingular, 6, 0.0, 42).unwrap();
        let b = generate(GeneratorKind::RandomNonsingular, 6, 0.0, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let c = generate(GeneratorKind::RandomNonsingular, 6, 0.0, 43).unwrap();
        assert_ne!(a.generator, c.generator);
    }

    #[test]
    fn bad_params() {
        assert!(generate(GeneratorKind::GramDefectTargeted, 3, 0.4, 1).is_err());
        assert!(generate(GeneratorKind::GramDefectTargeted, 3, 0.0, 1).is_err());
        assert!(generate(GeneratorKind::IdentityPerturbed, 3, -0.1, 1).is_err());
        assert!(generate(GeneratorKind::RandomNonsingular, 0, 0.0, 1).is_err());
        assert!(generate(GeneratorKind::IdentityPerturbed, 2, f64::NAN, 1).is_err());
    }

    #[test]
    fn orthogonal_factor_is_orthogonal() {
        let mut rng = SplitMix64::new(5);
        let a = Matrix::new(5, 5, rng.normal_vec(25)).unwrap();
        let q = orthogonal_factor(&a);
        let defect = q.gram().sub(&Matrix::identity(5)).max_abs();
        assert!(defect < 1e-14, "{defect}");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let inst = generate(GeneratorKind::RandomNonsingular, 5, 0.0, 2024).unwrap();
        let back = ProblemInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        for (a, b) in back.generator.as_slice().iter().zip(inst.generator.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_format() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let inst = ProblemInstance::new(a, vec![0.0, -0.1], "shear \"quoted\"").unwrap();
        let text = inst.to_json();
        assert!(text.starts_with("{\"m\": 2, \"A\": [[1.0000000000000000e0, 1.0000000000000000e0], "));
        assert!(text.contains("-1.0000000000000001e-1"));
        assert!(text.contains("\"label\": \"shear \\\"quoted\\\"\""));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["A"][1][0], 0.0);
    }

    #[test]
    fn malformed_documents() {
        let cases = [
            ("{\"m\": 2}", "missing fields"),
            ("{\"m\": 2, \"A\": [[1, 0]], \"z\": [1, 2]}", "row count"),
            ("{\"m\": 2, \"A\": [[1, 0], [0]], \"z\": [1, 2]}", "ragged"),
            ("{\"m\": 2, \"A\": [[1, 0], [0, 1]], \"z\": [1]}", "short z"),
            ("not json", "syntax"),
        ];
        for (text, why) in cases {
            assert!(ProblemInstance::from_json(text).is_err(), "{why}");
        }
        let singular = "{\"m\": 2, \"A\": [[1, 1], [1, 1]], \"z\": [1, 2], \"label\": \"s\"}";
        let err = ProblemInstance::from_json(singular).unwrap_err();
        assert!(matches!(err, Error::SingularGenerator { .. }));
    }
}

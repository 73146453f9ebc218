//! JSON serialization for problem instances.
//!
//! An instance file carries the data one audit or constant computation
//! needs: algebras, states, channels, POVMs, and subalgebra inclusions,
//! together with the generating seed and a schema version tag. Complex
//! entries are `[re, im]` pairs and matrices are row-major, so files are
//! readable and diffable; serialization is deterministic, making
//! regeneration from the same seed byte-identical.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElement, Algebra, Block};
use crate::channel::{self, Channel, Povm};
use crate::error::{Error, Result};
use crate::inclusion::Inclusion;
use crate::linalg::{C64, CMat};

pub const SCHEMA_VERSION: &str = "ncssa-instance-v1";

/// Row-major complex matrix with `[re, im]` entries.
pub type MatrixSpec = Vec<Vec<(f64, f64)>>;

pub fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
        .collect()
}

pub fn matrix_from_spec(rows: &MatrixSpec) -> Result<CMat> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::input("matrix entries are empty or ragged"));
    }
    let mut m = CMat::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, &(re, im)) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSpec {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub blocks: Vec<BlockSpec>,
}

impl AlgebraSpec {
    pub fn from_algebra(a: &Algebra) -> Self {
        AlgebraSpec {
            blocks: a
                .blocks()
                .iter()
                .map(|b| BlockSpec { dim: b.dim, weight: b.weight })
                .collect(),
        }
    }

    pub fn to_algebra(&self) -> Result<Algebra> {
        Algebra::new(
            self.blocks.iter().map(|b| Block { dim: b.dim, weight: b.weight }).collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementSpec {
    pub algebra: AlgebraSpec,
    pub blocks: Vec<MatrixSpec>,
}

impl ElementSpec {
    pub fn from_element(x: &AlgElement) -> Self {
        ElementSpec {
            algebra: AlgebraSpec::from_algebra(x.algebra()),
            blocks: x.blocks().iter().map(matrix_to_spec).collect(),
        }
    }

    pub fn to_element(&self) -> Result<AlgElement> {
        let alg = self.algebra.to_algebra()?;
        let mats = self.blocks.iter().map(matrix_from_spec).collect::<Result<Vec<_>>>()?;
        alg.element(mats)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmSpec {
    pub effects: Vec<MatrixSpec>,
}

impl PovmSpec {
    pub fn from_povm(p: &Povm) -> Self {
        PovmSpec { effects: p.effects().iter().map(matrix_to_spec).collect() }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        Povm::new(self.effects.iter().map(matrix_from_spec).collect::<Result<Vec<_>>>()?)
    }
}

/// An inclusion is stored through its embedding; reconstruction re-runs the
/// unital *-homomorphism validation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InclusionSpec {
    pub sub: AlgebraSpec,
    pub ambient: AlgebraSpec,
    pub embed: MatrixSpec,
}

impl InclusionSpec {
    pub fn from_inclusion(inc: &Inclusion) -> Self {
        InclusionSpec {
            sub: AlgebraSpec::from_algebra(inc.sub()),
            ambient: AlgebraSpec::from_algebra(inc.ambient()),
            embed: matrix_to_spec(inc.embed().coord()),
        }
    }

    pub fn to_inclusion(&self) -> Result<Inclusion> {
        Inclusion::from_embed(Channel::from_coord(
            self.sub.to_algebra()?,
            self.ambient.to_algebra()?,
            matrix_from_spec(&self.embed)?,
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Coordinate matrix on the vec layout; the lossless generic form.
    Coord { input: AlgebraSpec, output: AlgebraSpec, coord: MatrixSpec },
    Kraus { input: AlgebraSpec, output: AlgebraSpec, kraus: Vec<MatrixSpec> },
    /// Measurement channel onto the diagonal of the outcome set.
    Povm { effects: Vec<MatrixSpec> },
    /// The trace-adjoint conditional expectation of an inclusion.
    CondExp { inclusion: InclusionSpec },
}

impl ChannelSpec {
    pub fn from_channel(ch: &Channel) -> Self {
        ChannelSpec::Coord {
            input: AlgebraSpec::from_algebra(ch.input()),
            output: AlgebraSpec::from_algebra(ch.output()),
            coord: matrix_to_spec(ch.coord()),
        }
    }

    pub fn from_povm(p: &Povm) -> Self {
        ChannelSpec::Povm { effects: p.effects().iter().map(matrix_to_spec).collect() }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Coord { input, output, coord } => Channel::from_coord(
                input.to_algebra()?,
                output.to_algebra()?,
                matrix_from_spec(coord)?,
            ),
            ChannelSpec::Kraus { input, output, kraus } => Channel::from_kraus(
                input.to_algebra()?,
                output.to_algebra()?,
                &kraus.iter().map(matrix_from_spec).collect::<Result<Vec<_>>>()?,
            ),
            ChannelSpec::Povm { effects } => channel::povm_channel(&PovmSpec {
                effects: effects.clone(),
            }
            .to_povm()?),
            ChannelSpec::CondExp { inclusion } => {
                Ok(inclusion.to_inclusion()?.cond_exp().clone())
            }
        }
    }
}

/// One serialized problem instance. Optional fields are present when the
/// generating preset defines them: `r_inc` constrains the first channel's
/// output (overlap constants), while `exp_inc`/`exp_channel` carry a
/// state-preserving expectation on the second channel's output (divergence
/// corrections).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub schema: String,
    pub preset: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_a: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_b: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm_a: Option<PovmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm_b: Option<PovmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_inc: Option<InclusionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_inc: Option<InclusionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_inc: Option<InclusionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_inc: Option<InclusionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_channel: Option<ChannelSpec>,
}

impl InstanceSpec {
    pub fn new(preset: &str, seed: u64, dims: &[usize]) -> Self {
        InstanceSpec {
            schema: SCHEMA_VERSION.to_string(),
            preset: preset.to_string(),
            seed,
            dims: dims.to_vec(),
            phi_a: None,
            phi_b: None,
            povm_a: None,
            povm_b: None,
            rho: None,
            sigma: None,
            r_inc: None,
            a_inc: None,
            b_inc: None,
            exp_inc: None,
            exp_channel: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::input(format!("instance serialization: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: InstanceSpec = serde_json::from_str(text)
            .map_err(|e| Error::input(format!("instance JSON: {e}")))?;
        if spec.schema != SCHEMA_VERSION {
            return Err(Error::input(format!(
                "schema version '{}' is not supported (expected '{SCHEMA_VERSION}')",
                spec.schema
            )));
        }
        Ok(spec)
    }

    fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| Error::input(format!("instance lacks field '{name}'")))
    }

    pub fn channel_pair(&self) -> Result<(Channel, Channel)> {
        Ok((
            Self::require(&self.phi_a, "phi_a")?.to_channel()?,
            Self::require(&self.phi_b, "phi_b")?.to_channel()?,
        ))
    }

    pub fn povm_pair(&self) -> Result<(Povm, Povm)> {
        Ok((
            Self::require(&self.povm_a, "povm_a")?.to_povm()?,
            Self::require(&self.povm_b, "povm_b")?.to_povm()?,
        ))
    }

    pub fn state_pair(&self) -> Result<(AlgElement, AlgElement)> {
        Ok((
            Self::require(&self.rho, "rho")?.to_element()?,
            Self::require(&self.sigma, "sigma")?.to_element()?,
        ))
    }

    pub fn constraint_inclusion(&self) -> Result<Inclusion> {
        Self::require(&self.r_inc, "r_inc")?.to_inclusion()
    }

    pub fn subalgebra_triple(&self) -> Result<(Inclusion, Inclusion, Inclusion)> {
        Ok((
            Self::require(&self.a_inc, "a_inc")?.to_inclusion()?,
            Self::require(&self.b_inc, "b_inc")?.to_inclusion()?,
            Self::require(&self.r_inc, "r_inc")?.to_inclusion()?,
        ))
    }

    pub fn expectation(&self) -> Result<(Inclusion, Channel)> {
        Ok((
            Self::require(&self.exp_inc, "exp_inc")?.to_inclusion()?,
            Self::require(&self.exp_channel, "exp_channel")?.to_channel()?,
        ))
    }
}

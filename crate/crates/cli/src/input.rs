//! The JSON document read by `base-change --input`.

use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseChangeInput {
    pub schema_version: u32,
    /// Highest level of the source truncation.
    pub max_level: usize,
    #[serde(default)]
    pub base: BaseKind,
    pub monoid: MonoidSpec,
    /// Endpoint sign for each element of a constant monoid, used by `--functor J --direction ran`.
    #[serde(default)]
    pub theta: Option<Vec<u8>>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    #[default]
    Trivial,
    Weyl,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MonoidSpec {
    /// The same finite monoid at every level, restrictions identities, sliced over the unit.
    Constant { size: usize, mul: Vec<u32> },
    /// A shipped family over the Weyl group through its canonical map.
    /// With `times_c2` it is multiplied by a constant `C2` that records the endpoint sign.
    Group {
        family: String,
        #[serde(default)]
        times_c2: bool,
    },
}

pub fn parse(text: &str) -> Result<BaseChangeInput, String> {
    let input: BaseChangeInput = serde_json::from_str(text).map_err(|e| format!("--input: {e}"))?;
    if input.schema_version != 1 {
        return Err(format!("--input: unsupported schema_version {}", input.schema_version));
    }
    if let MonoidSpec::Constant { size, mul } = &input.monoid {
        if *size == 0 || mul.len() != size * size || mul.iter().any(|&v| v as usize >= *size) {
            return Err("--input: constant monoid needs a size x size product table with entries below size".into());
        }
    }
    Ok(input)
}

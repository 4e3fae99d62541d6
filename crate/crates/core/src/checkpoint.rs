//! Plain-text model checkpoints.
//!
//! Every real number is stored as the hex of its IEEE-754 bits, so a saved
//! model loads back bit-for-bit. Layout:
//!
//! ```text
//! v2v-anomaly-checkpoint 1 dae
//! widths 5 128 64 20 64 128 5
//! layer 0 relu
//! w 3fb2... 3fa0...
//! b 0000... ...
//! ...
//! end
//! ```

use std::fs;
use std::path::Path;

use crate::dae::{Architecture, DaeModel, Dense};
use crate::error::{Error, Result};
use crate::ocsvm::OcsvmModel;
use crate::trace::{Scaler, FEATURE_DIM};

const MAGIC: &str = "v2v-anomaly-checkpoint";
const VERSION: u32 = 1;

fn hex(values: &[f64]) -> String {
    let words: Vec<String> = values.iter().map(|v| format!("{:016x}", v.to_bits())).collect();
    words.join(" ")
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate() }
    }

    /// Next line split into its tag and the remaining words; the tag must match.
    fn expect(&mut self, tag: &str) -> Result<Vec<&'a str>> {
        let (no, line) = self
            .inner
            .next()
            .ok_or_else(|| bad(format!("unexpected end of file, wanted `{tag}`")))?;
        let mut words = line.split_ascii_whitespace();
        match words.next() {
            Some(t) if t == tag => Ok(words.collect()),
            other => Err(bad(format!(
                "line {}: expected `{tag}`, found `{}`",
                no + 1,
                other.unwrap_or("")
            ))),
        }
    }

    fn reals(&mut self, tag: &str, n: usize) -> Result<Vec<f64>> {
        let words = self.expect(tag)?;
        if words.len() != n {
            return Err(bad(format!("`{tag}` holds {} values, expected {n}", words.len())));
        }
        words
            .iter()
            .map(|w| {
                u64::from_str_radix(w, 16)
                    .map(f64::from_bits)
                    .map_err(|_| bad(format!("`{w}` is not a hex-encoded real")))
            })
            .collect()
    }
}

fn header(kind: &str) -> String {
    format!("{MAGIC} {VERSION} {kind}\n")
}

fn check_header(lines: &mut Lines<'_>, kind: &str) -> Result<()> {
    let words = lines.expect(MAGIC)?;
    match words.as_slice() {
        [v, k] if *v == VERSION.to_string() && *k == kind => Ok(()),
        [v, _] if *v != VERSION.to_string() => Err(bad(format!("unsupported version {v}"))),
        [_, k] => Err(bad(format!("checkpoint holds a `{k}` model, expected `{kind}`"))),
        _ => Err(bad("malformed header")),
    }
}

fn to_array(v: Vec<f64>) -> [f64; FEATURE_DIM] {
    v.try_into().expect("length checked by reals()")
}

pub fn dae_to_string(model: &DaeModel) -> String {
    let mut out = header("dae");
    let widths: Vec<String> = model.arch.widths().iter().map(usize::to_string).collect();
    out += &format!("widths {}\n", widths.join(" "));
    for (i, layer) in model.layers.iter().enumerate() {
        let act = if layer.relu { "relu" } else { "linear" };
        out += &format!("layer {i} {act}\nw {}\nb {}\n", hex(&layer.weights), hex(&layer.bias));
    }
    out + "end\n"
}

pub fn dae_from_str(text: &str) -> Result<DaeModel> {
    let mut lines = Lines::new(text);
    check_header(&mut lines, "dae")?;
    let widths = lines
        .expect("widths")?
        .iter()
        .map(|w| w.parse::<usize>().map_err(|_| bad(format!("bad width `{w}`"))))
        .collect::<Result<Vec<_>>>()?;
    let arch = Architecture::new(widths).map_err(|e| bad(e.to_string()))?;
    let mask = arch.activation_mask();
    let mut layers = Vec::new();
    for (i, pair) in arch.widths().windows(2).enumerate() {
        let words = lines.expect("layer")?;
        let relu = match words.as_slice() {
            [n, act] if *n == i.to_string() => *act == "relu",
            _ => return Err(bad(format!("malformed header of layer {i}"))),
        };
        if relu != mask[i] {
            return Err(bad(format!("layer {i} activation disagrees with the architecture")));
        }
        let (inputs, outputs) = (pair[0], pair[1]);
        layers.push(Dense {
            inputs,
            outputs,
            weights: lines.reals("w", inputs * outputs)?,
            bias: lines.reals("b", outputs)?,
            relu,
        });
    }
    lines.expect("end")?;
    Ok(DaeModel { arch, layers })
}

pub fn ocsvm_to_string(model: &OcsvmModel) -> String {
    format!(
        "{}w {}\nrho {}\nnu {}\nend\n",
        header("ocsvm"),
        hex(&model.w),
        hex(&[model.rho]),
        hex(&[model.nu])
    )
}

pub fn ocsvm_from_str(text: &str) -> Result<OcsvmModel> {
    let mut lines = Lines::new(text);
    check_header(&mut lines, "ocsvm")?;
    let w = to_array(lines.reals("w", FEATURE_DIM)?);
    let rho = lines.reals("rho", 1)?[0];
    let nu = lines.reals("nu", 1)?[0];
    lines.expect("end")?;
    Ok(OcsvmModel { w, rho, nu })
}

pub fn scaler_to_string(s: &Scaler) -> String {
    format!("{}min {}\nmax {}\nend\n", header("scaler"), hex(&s.min), hex(&s.max))
}

pub fn scaler_from_str(text: &str) -> Result<Scaler> {
    let mut lines = Lines::new(text);
    check_header(&mut lines, "scaler")?;
    let min = to_array(lines.reals("min", FEATURE_DIM)?);
    let max = to_array(lines.reals("max", FEATURE_DIM)?);
    lines.expect("end")?;
    Ok(Scaler { min, max })
}

fn read(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

pub fn save_dae(model: &DaeModel, path: &Path) -> Result<()> {
    Ok(fs::write(path, dae_to_string(model))?)
}

pub fn load_dae(path: &Path) -> Result<DaeModel> {
    dae_from_str(&read(path)?)
}

pub fn save_ocsvm(model: &OcsvmModel, path: &Path) -> Result<()> {
    Ok(fs::write(path, ocsvm_to_string(model))?)
}

pub fn load_ocsvm(path: &Path) -> Result<OcsvmModel> {
    ocsvm_from_str(&read(path)?)
}

pub fn save_scaler(scaler: &Scaler, path: &Path) -> Result<()> {
    Ok(fs::write(path, scaler_to_string(scaler))?)
}

pub fn load_scaler(path: &Path) -> Result<Scaler> {
    scaler_from_str(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dae::init_model;

    #[test]
    fn dae_round_trip_is_exact() {
        let mut m = init_model(&Architecture::with_hidden(9, 7).unwrap(), 3).unwrap();
        m.layers[2].bias[1] = -0.0;
        m.layers[0].weights[0] = f64::MIN_POSITIVE / 3.0;
        let back = dae_from_str(&dae_to_string(&m)).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.layers[2].bias[1].to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn ocsvm_and_scaler_round_trip() {
        let m = OcsvmModel {
            w: [0.1, -2.5, 1e-300, 3.0, 0.0],
            rho: 0.7,
            nu: 0.1,
        };
        assert_eq!(ocsvm_from_str(&ocsvm_to_string(&m)).unwrap(), m);
        let s = Scaler {
            min: [0.0, 1.0, -90.0, 3.0, 4.0],
            max: [2000.0, 1999.5, -30.25, 2000.0, 1990.0],
        };
        assert_eq!(scaler_from_str(&scaler_to_string(&s)).unwrap(), s);
    }

    #[test]
    fn rejects_wrong_kind_and_truncation() {
        let text = scaler_to_string(&Scaler {
            min: [0.0; FEATURE_DIM],
            max: [1.0; FEATURE_DIM],
        });
        assert!(matches!(ocsvm_from_str(&text), Err(Error::Checkpoint(_))));
        let cut: String = text.lines().take(2).collect::<Vec<_>>().join("\n");
        assert!(matches!(scaler_from_str(&cut), Err(Error::Checkpoint(_))));
        let bumped = text.replacen(" 1 scaler", " 9 scaler", 1);
        assert!(scaler_from_str(&bumped).unwrap_err().to_string().contains("version"));
    }
}

//! Signal JSON documents and atomic file output.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use serde_json::ser::{Formatter, PrettyFormatter};

use super::field::fmt17;
use super::{hermite, Hbar, Poly, PolyGaussChirp, SampledSignal, Signal, UniformGrid1D};
use crate::error::{Error, Result};

/// On-disk description of a signal, tagged by `family`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalDoc {
    /// Unit-norm `(2ħ)^{1/4} e^{−πħu²}`.
    Gaussian { hbar: Hbar },
    Hermite { hbar: Hbar, n: usize },
    PolyGaussChirp {
        hbar: Hbar,
        poly: Vec<C64>,
        alpha: C64,
        beta: C64,
        gamma: C64,
    },
    Samples {
        hbar: Hbar,
        start: f64,
        step: f64,
        values: Vec<C64>,
    },
}

impl SignalDoc {
    pub fn hbar(&self) -> Hbar {
        match self {
            SignalDoc::Gaussian { hbar }
            | SignalDoc::Hermite { hbar, .. }
            | SignalDoc::PolyGaussChirp { hbar, .. }
            | SignalDoc::Samples { hbar, .. } => *hbar,
        }
    }

    pub fn to_signal(&self) -> Result<Signal> {
        Ok(match self {
            SignalDoc::Gaussian { hbar } => hermite(0, *hbar)?.into(),
            SignalDoc::Hermite { hbar, n } => hermite(*n, *hbar)?.into(),
            SignalDoc::PolyGaussChirp { poly, alpha, beta, gamma, .. } => {
                PolyGaussChirp::new(Poly(poly.clone()), *alpha, *beta, *gamma)?.into()
            }
            SignalDoc::Samples { start, step, values, .. } => {
                let grid = UniformGrid1D::new(*start, *step, values.len())?;
                SampledSignal::new(grid, values.clone())?.into()
            }
        })
    }

    pub fn from_samples(s: &SampledSignal, hbar: Hbar) -> Self {
        SignalDoc::Samples {
            hbar,
            start: s.grid().start(),
            step: s.grid().step(),
            values: s.values().to_vec(),
        }
    }

    pub fn from_signal(s: &Signal, hbar: Hbar) -> Self {
        match s {
            Signal::Exact(f) => SignalDoc::PolyGaussChirp {
                hbar,
                poly: f.poly().coeffs().to_vec(),
                alpha: f.alpha(),
                beta: f.beta(),
                gamma: f.gamma(),
            },
            Signal::Sampled(s) => Self::from_samples(s, hbar),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        to_json_text(self).expect("signal documents serialize")
    }
}

/// Pretty printing with every float as 17 significant digits.
struct Digits17(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?),* $(,)?) => {
        $(fn $name<W: ?Sized + std::io::Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> std::io::Result<()> {
            self.0.$name(w $(, $arg)?)
        })*
    };
}

impl Formatter for Digits17 {
    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        begin_object_value,
        end_object_value,
    );

    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }
}

/// Pretty JSON with a trailing newline; floats are written with 17
/// significant digits, non-finite ones as `null`.
pub fn to_json_text<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::other(format!("{} has no file name", path.display()))))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_round_trip_byte_identically() {
        let docs = [
            r#"{"family":"gaussian","hbar":1.0}"#,
            r#"{"family":"hermite","hbar":0.7,"n":3}"#,
            r#"{"family":"poly_gauss_chirp","hbar":1.0,"poly":[[1.0,0.0],[0.0,0.5]],"alpha":[1.0,0.2],"beta":[0.0,0.0],"gamma":[0.0,0.0]}"#,
            r#"{"family":"samples","hbar":1.0,"start":-1.0,"step":0.1,"values":[[0.1,0.2],[0.30000000000000004,-1e-300]]}"#,
        ];
        for d in docs {
            let doc = SignalDoc::from_json(d).unwrap();
            let text = doc.to_json();
            let again = SignalDoc::from_json(&text).unwrap();
            assert_eq!(again, doc);
            assert_eq!(again.to_json(), text);
            doc.to_signal().unwrap();
        }
    }

    #[test]
    fn invalid_documents_are_rejected() {
        assert!(SignalDoc::from_json(r#"{"family":"gaussian","hbar":-1.0}"#).is_err());
        assert!(SignalDoc::from_json(r#"{"family":"wavelet","hbar":1.0}"#).is_err());
        let bad_alpha = r#"{"family":"poly_gauss_chirp","hbar":1.0,"poly":[[1.0,0.0]],"alpha":[-1.0,0.0],"beta":[0.0,0.0],"gamma":[0.0,0.0]}"#;
        assert!(SignalDoc::from_json(bad_alpha).unwrap().to_signal().is_err());
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let text = to_json_text(&[0.1, 1.0, -2.5e-300, f64::NAN]).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("1.0000000000000000e0"));
        assert!(text.contains("null"));
        let back: Vec<Option<f64>> = serde_json::from_str(&text).unwrap();
        assert_eq!(back[0], Some(0.1));
        assert_eq!(back[2], Some(-2.5e-300));
    }

    #[test]
    fn gaussian_document_is_unit_norm() {
        let s = SignalDoc::Gaussian { hbar: Hbar::new(2.0).unwrap() }.to_signal().unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }
}

//! JSON interchange formats and a deterministic printer.
//!
//! A complex scalar is `[re, im]`. Formats:
//!
//! | object         | shape                                   |
//! |----------------|-----------------------------------------|
//! | pure state     | `{"n": int, "vec": [[re, im], ...]}`    |
//! | density matrix | `{"n": int, "rho": [[[re, im], ...], ...]}` |
//! | ensemble       | `{"probs": [p, ...], "states": [pure state, ...]}` |
//! | Hadamard       | `{"n": int, "H": [[[re, im], ...], ...]}` or `{"theta": [[rad, ...], ...]}` |
//! | Bell basis     | `{"n": int, "hadamards": [Hadamard, ...]}` |
//!
//! Output goes through [`to_json_string`], which sorts keys and prints
//! every float with 17 significant digits, so equal values always give
//! byte-identical text.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bell::BellBasis;
use crate::error::{Error, Result};
use crate::hadamard::HadamardCandidate;
use crate::numerics::{ComplexMatrix, Tolerance, C64};
use crate::states::{DensityMatrix, Ensemble, PureState};

type WireComplex = [f64; 2];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePure {
    n: usize,
    vec: Vec<WireComplex>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDensity {
    n: usize,
    rho: Vec<Vec<WireComplex>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEnsemble {
    #[serde(default)]
    n: Option<usize>,
    probs: Vec<f64>,
    states: Vec<WirePure>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WireHadamard {
    Entries {
        n: Option<usize>,
        #[serde(rename = "H")]
        h: Vec<Vec<WireComplex>>,
    },
    Angles {
        theta: Vec<Vec<f64>>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireBell {
    n: usize,
    hadamards: Vec<WireHadamard>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn complex(z: WireComplex) -> C64 {
    C64::new(z[0], z[1])
}

fn matrix(rows: Vec<Vec<WireComplex>>) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows.into_iter().map(|r| r.into_iter().map(complex).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

fn pure_from_wire(w: WirePure) -> Result<PureState> {
    PureState::new(w.n, w.vec.into_iter().map(complex).collect())
}

fn hadamard_from_wire(w: WireHadamard) -> Result<HadamardCandidate> {
    match w {
        WireHadamard::Entries { n, h } => {
            let m = matrix(h)?;
            if let Some(n) = n {
                if m.rows() != n {
                    return Err(Error::DimensionMismatch(format!("\"n\" is {n} but H has {} rows", m.rows())));
                }
            }
            HadamardCandidate::new(m)
        }
        WireHadamard::Angles { theta } => HadamardCandidate::from_angles(&theta),
    }
}

pub fn parse_pure_state(text: &str) -> Result<PureState> {
    pure_from_wire(parse(text)?)
}

/// Parses and validates (Hermitian, unit trace, PSD) a density matrix.
pub fn parse_density(text: &str, tol: &Tolerance) -> Result<DensityMatrix> {
    let w: WireDensity = parse(text)?;
    DensityMatrix::new(w.n, matrix(w.rho)?, tol)
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    let w: WireEnsemble = parse(text)?;
    let states = w.states.into_iter().map(pure_from_wire).collect::<Result<Vec<_>>>()?;
    if let (Some(n), Some(first)) = (w.n, states.first()) {
        if first.dim() != n {
            return Err(Error::DimensionMismatch(format!("\"n\" is {n} but states have dimension {}", first.dim())));
        }
    }
    Ensemble::new(w.probs, states)
}

pub fn parse_hadamard(text: &str) -> Result<HadamardCandidate> {
    hadamard_from_wire(parse(text)?)
}

pub fn parse_bell_basis(text: &str, tol: &Tolerance) -> Result<BellBasis> {
    let w: WireBell = parse(text)?;
    let hs = w.hadamards.into_iter().map(hadamard_from_wire).collect::<Result<Vec<_>>>()?;
    let basis = BellBasis::new(hs, tol)?;
    if basis.dim() != w.n {
        return Err(Error::DimensionMismatch(format!("\"n\" is {} but matrices have order {}", w.n, basis.dim())));
    }
    Ok(basis)
}

/// Density matrix or ensemble, decided by the keys present.
#[derive(Debug, Clone)]
pub enum StateInput {
    Density(DensityMatrix),
    Ensemble(Ensemble),
}

pub fn parse_state_input(text: &str, tol: &Tolerance) -> Result<StateInput> {
    let v: Value = parse(text)?;
    if v.get("probs").is_some() {
        parse_ensemble(text).map(StateInput::Ensemble)
    } else {
        parse_density(text, tol).map(StateInput::Density)
    }
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| complex_json(z)).collect())
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(m.row(i))).collect())
}

pub fn real_matrix_json(rows: &[Vec<f64>]) -> Value {
    json!(rows)
}

pub fn pure_state_json(psi: &PureState) -> Value {
    json!({"n": psi.dim(), "vec": vector_json(psi.amplitudes())})
}

pub fn density_json(rho: &DensityMatrix) -> Value {
    json!({"n": rho.dim(), "rho": matrix_json(rho.matrix())})
}

pub fn ensemble_json(ens: &Ensemble) -> Value {
    json!({
        "n": ens.dim(),
        "probs": ens.probs(),
        "states": ens.states().iter().map(pure_state_json).collect::<Vec<_>>(),
    })
}

pub fn hadamard_json(h: &HadamardCandidate) -> Value {
    json!({"n": h.order(), "H": matrix_json(h.matrix())})
}

pub fn hadamard_angles_json(h: &HadamardCandidate) -> Value {
    json!({"n": h.order(), "theta": h.angles()})
}

pub fn bell_basis_json(b: &BellBasis) -> Value {
    json!({"n": b.dim(), "hadamards": b.hadamards().iter().map(hadamard_json).collect::<Vec<_>>()})
}

/// Serializes with sorted keys and floats printed as `{:.16e}`; `pretty`
/// indents by two spaces.
pub fn to_json_string(v: &Value, pretty: bool) -> String {
    let mut out = String::new();
    write_value(&mut out, v, pretty, 0);
    out
}

fn write_value(out: &mut String, v: &Value, pretty: bool, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64 number");
                out.push_str(&format!("{x:.16e}"));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // numeric leaves stay on one line to keep pretty output readable
            let flat = !pretty || items.iter().all(|x| !x.is_array() && !x.is_object());
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                    if pretty && flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    newline(out, depth + 1);
                }
                write_value(out, item, pretty, depth + 1);
            }
            if !flat {
                newline(out, depth);
            }
            out.push(']');
        }
        Value::Object(map) => write_object(out, map, pretty, depth),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, pretty: bool, depth: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, k) in keys.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if pretty {
            newline(out, depth + 1);
        }
        out.push_str(&Value::String((*k).clone()).to_string());
        out.push(':');
        if pretty {
            out.push(' ');
        }
        write_value(out, &map[k.as_str()], pretty, depth + 1);
    }
    if pretty {
        newline(out, depth);
    }
    out.push('}');
}

fn newline(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::weyl_basis;
    use crate::hadamard::{family_n4, fourier};

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pure_state_round_trip() {
        let text = r#"{"n": 2, "vec": [[0.7071067811865476, 0], [0, 0], [0, 0], [0, 0.7071067811865476]]}"#;
        let psi = parse_pure_state(text).unwrap();
        assert_eq!(psi.dim(), 2);
        let again = parse_pure_state(&to_json_string(&pure_state_json(&psi), false)).unwrap();
        assert_eq!(again, psi);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_pure_state("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_pure_state(r#"{"n": 2, "vec": [[1, 0]]}"#), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            parse_pure_state(r#"{"n": 1, "vec": [[2, 0]]}"#),
            Err(Error::NotNormalized { .. })
        ));
        let trivial = r#"{"n": 1, "rho": [[[1, 0]]]}"#;
        assert!(parse_density(trivial, &t()).is_ok());
        let negative = r#"{"n": 2, "rho": [[[1.5,0],[0,0],[0,0],[0,0]],[[0,0],[-0.5,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(parse_density(negative, &t()).is_err());
    }

    #[test]
    fn density_and_ensemble_round_trip() {
        let rho = DensityMatrix::maximally_mixed(2);
        let back = parse_density(&to_json_string(&density_json(&rho), true), &t()).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        let ens = Ensemble::uniform(vec![PureState::basis(2, 0, 0), PureState::basis(2, 1, 1)]).unwrap();
        let text = to_json_string(&ensemble_json(&ens), false);
        assert!(matches!(parse_state_input(&text, &t()).unwrap(), StateInput::Ensemble(_)));
        let back = parse_ensemble(&text).unwrap();
        assert_eq!(back.probs(), ens.probs());
    }

    #[test]
    fn hadamard_formats() {
        let f = fourier(3);
        let back = parse_hadamard(&to_json_string(&hadamard_json(&f), false)).unwrap();
        assert_eq!(back.matrix(), f.matrix());
        let h = family_n4(0.25);
        let back = parse_hadamard(&to_json_string(&hadamard_angles_json(&h), false)).unwrap();
        assert!((back.matrix() - h.matrix()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn bell_basis_format() {
        let b = weyl_basis(3);
        let back = parse_bell_basis(&to_json_string(&bell_basis_json(&b), false), &t()).unwrap();
        assert!(back.gram_residual() < 1e-14);
        let wrong = r#"{"n": 3, "hadamards": [{"H": [[[1,0],[1,0]],[[1,0],[-1,0]]]}, {"H": [[[1,0],[1,0]],[[1,0],[-1,0]]]}]}"#;
        assert!(matches!(parse_bell_basis(wrong, &t()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn printer_is_deterministic_and_sorted() {
        let v = json!({"b": 0.1, "a": [1, 2.5, -3e-20], "c": {"z": true, "y": null}});
        let s = to_json_string(&v, false);
        assert_eq!(
            s,
            r#"{"a":[1,2.5000000000000000e0,-3.0000000000000003e-20],"b":1.0000000000000001e-1,"c":{"y":null,"z":true}}"#
        );
        let parsed: Value = serde_json::from_str(&to_json_string(&v, true)).unwrap();
        assert_eq!(parsed["b"], json!(0.1));
        assert_eq!(parsed["a"][2], json!(-3e-20));
    }
}

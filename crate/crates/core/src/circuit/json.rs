use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Circuit, Gate, GateKind, GateRef};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RefRepr {
    Gate(usize),
    Input(String, usize, usize),
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    in1: RefRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    in2: Option<RefRepr>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    #[serde(rename = "N")]
    n: usize,
    gates: Vec<GateRepr>,
}

fn ref_out(r: GateRef) -> RefRepr {
    match r {
        GateRef::Gate(t) => RefRepr::Gate(t + 1),
        GateRef::Input { i, j } => RefRepr::Input("in".into(), i + 1, j + 1),
    }
}

fn ref_in(r: RefRepr) -> Result<GateRef, String> {
    match r {
        RefRepr::Gate(0) => Err("gate indices are 1-based".into()),
        RefRepr::Gate(t) => Ok(GateRef::Gate(t - 1)),
        RefRepr::Input(tag, i, j) if tag == "in" && i > 0 && j > 0 => {
            Ok(GateRef::Input { i: i - 1, j: j - 1 })
        }
        RefRepr::Input(tag, i, j) => Err(format!("bad input reference [{tag:?}, {i}, {j}]")),
    }
}

impl Serialize for Circuit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let gates = self
            .gates
            .iter()
            .map(|g| match g.kind {
                GateKind::Not => GateRepr {
                    kind: "NOT".into(),
                    in1: ref_out(g.in1),
                    in2: None,
                },
                GateKind::Nand => GateRepr {
                    kind: "NAND".into(),
                    in1: ref_out(g.in1),
                    in2: Some(ref_out(g.in2)),
                },
            })
            .collect();
        CircuitRepr { n: self.n, gates }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CircuitRepr::deserialize(deserializer)?;
        let mut gates = Vec::with_capacity(repr.gates.len());
        for g in repr.gates {
            let in1 = ref_in(g.in1).map_err(D::Error::custom)?;
            let gate = match g.kind.as_str() {
                "NOT" => Gate::not(in1),
                "NAND" => {
                    let in2 = g
                        .in2
                        .ok_or_else(|| D::Error::custom("NAND gate without in2"))?;
                    Gate::nand(in1, ref_in(in2).map_err(D::Error::custom)?)
                }
                other => return Err(D::Error::custom(format!("unknown gate kind {other:?}"))),
            };
            gates.push(gate);
        }
        Circuit::new(repr.n, gates).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_indexing() {
        let c = Circuit::new(
            1,
            vec![
                Gate::nand(GateRef::Input { i: 0, j: 0 }, GateRef::Input { i: 0, j: 6 }),
                Gate::not(GateRef::Gate(0)),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"N":1,"gates":[{"kind":"NAND","in1":["in",1,1],"in2":["in",1,7]},{"kind":"NOT","in1":1}]}"#
        );
        let back: Circuit = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn forward_reference_rejected_at_load() {
        let s = r#"{"N":1,"gates":[{"kind":"NOT","in1":2},{"kind":"NOT","in1":["in",1,1]}]}"#;
        assert!(serde_json::from_str::<Circuit>(s).is_err());
    }
}

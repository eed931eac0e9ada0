//! Decomposition reports: stable JSON, readable text, DOT diagrams.
//!
//! The JSON body is fully deterministic (canonical ordering everywhere);
//! timing lives in the envelope next to it so two runs on the same input
//! produce byte-identical bodies.

use serde::Serialize;

use crate::algebra::{ElemSet, FiniteAlgebra};
use crate::format::render_algebra;
use crate::systems::{Decomposition, Obstruction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct ReportEnvelope<'a> {
    pub schema: u32,
    pub report: &'a ReportBody,
    pub timing_ms: u64,
}

#[derive(Serialize)]
pub struct ReportBody {
    pub algebra: AlgebraInfo,
    pub isolated_family: FamilyInfo,
    pub frames: Vec<FrameInfo>,
    pub systems: Vec<SystemInfo>,
    pub verdict: bool,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct AlgebraInfo {
    pub name: String,
    pub digest: String,
    pub elements: Vec<String>,
    pub signature: Vec<(String, usize)>,
}

#[derive(Serialize)]
pub struct FamilyInfo {
    pub members: Vec<MemberInfo>,
    pub top: String,
}

#[derive(Serialize)]
pub struct MemberInfo {
    pub label: String,
    pub universe: Vec<String>,
}

#[derive(Serialize)]
pub struct FrameInfo {
    pub id: usize,
    pub members: Vec<String>,
    pub covering: Vec<(String, String)>,
    pub complements: Vec<ComplementInfo>,
    pub sound_sets: usize,
    pub obstructions: Vec<String>,
    pub systems: Vec<usize>,
}

#[derive(Serialize)]
pub struct ComplementInfo {
    pub member: String,
    pub universe: Vec<String>,
}

#[derive(Serialize)]
pub struct SystemInfo {
    pub id: usize,
    pub frame: usize,
    pub indices: Vec<String>,
    pub covering: Vec<(String, String)>,
    pub components: Vec<ComponentInfo>,
    pub homs: Vec<HomInfo>,
    pub reconstruction_verified: bool,
}

#[derive(Serialize)]
pub struct ComponentInfo {
    pub index: String,
    pub universe: Vec<String>,
}

#[derive(Serialize)]
pub struct HomInfo {
    pub from: String,
    pub to: String,
    pub map: Vec<(String, String)>,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn set_names(alg: &FiniteAlgebra, set: ElemSet) -> Vec<String> {
    set.iter()
        .map(|id| alg.element_name(id).to_string())
        .collect()
}

fn member_label(family_index: usize) -> String {
    format!("I{}", family_index + 1)
}

fn obstruction_text(
    alg: &FiniteAlgebra,
    d: &Decomposition,
    frame_idx: usize,
    o: &Obstruction,
) -> String {
    let frame = &d.frames[frame_idx].frame;
    match o {
        Obstruction::NoPHom {
            src,
            dst,
            plain_homs,
            rejected,
        } => {
            let s = alg.format_set(frame.complement(*src));
            let t = alg.format_set(frame.complement(*dst));
            if *plain_homs == 0 {
                format!("no homomorphism from {s} into {t}")
            } else {
                let detail = rejected
                    .as_ref()
                    .and_then(|(map, violations)| {
                        violations.first().map(|v| {
                            format!(
                                "{} violates the sum condition: {}",
                                map.format_with(alg, alg),
                                v.format_with(alg)
                            )
                        })
                    })
                    .unwrap_or_default();
                format!(
                    "{plain_homs} homomorphism(s) from {s} into {t}, none is a P-homomorphism; {detail}"
                )
            }
        }
        Obstruction::PathDependence { src, dst } => format!(
            "chain composites from {} to {} disagree for every choice of covering maps",
            alg.format_set(frame.complement(*src)),
            alg.format_set(frame.complement(*dst))
        ),
    }
}

/// Builds the serializable body from a finished decomposition.
pub fn build_report(alg: &FiniteAlgebra, d: &Decomposition) -> ReportBody {
    let digest = format!("{:016x}", fnv1a64(render_algebra(alg).as_bytes()));
    let algebra = AlgebraInfo {
        name: alg.name().to_string(),
        digest,
        elements: alg.element_names().to_vec(),
        signature: alg.signature(),
    };
    let isolated_family = FamilyInfo {
        members: d
            .family
            .members()
            .iter()
            .enumerate()
            .map(|(i, m)| MemberInfo {
                label: member_label(i),
                universe: set_names(alg, *m),
            })
            .collect(),
        top: member_label(d.family.top()),
    };

    let mut frames = Vec::with_capacity(d.frames.len());
    for (fi, fa) in d.frames.iter().enumerate() {
        let frame = &fa.frame;
        let label = |pos: usize| member_label(frame.members()[pos]);
        frames.push(FrameInfo {
            id: fi + 1,
            members: (0..frame.len()).map(label).collect(),
            covering: frame
                .covering()
                .iter()
                .map(|&(i, j)| (label(i), label(j)))
                .collect(),
            complements: (0..frame.len())
                .map(|pos| ComplementInfo {
                    member: label(pos),
                    universe: set_names(alg, frame.complement(pos)),
                })
                .collect(),
            sound_sets: fa.sound_sets.len(),
            obstructions: fa
                .obstructions
                .iter()
                .map(|o| obstruction_text(alg, d, fi, o))
                .collect(),
            systems: d
                .systems
                .iter()
                .enumerate()
                .filter(|(_, s)| s.frame_index == fi)
                .map(|(si, _)| si + 1)
                .collect(),
        });
    }

    let systems = d
        .systems
        .iter()
        .enumerate()
        .map(|(si, entry)| {
            let sys = &entry.system;
            SystemInfo {
                id: si + 1,
                frame: entry.frame_index + 1,
                indices: sys.indices().names().to_vec(),
                covering: sys
                    .indices()
                    .covering()
                    .iter()
                    .map(|&(i, j)| {
                        (
                            sys.indices().name(i).to_string(),
                            sys.indices().name(j).to_string(),
                        )
                    })
                    .collect(),
                components: sys
                    .components()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| ComponentInfo {
                        index: sys.indices().name(i).to_string(),
                        universe: c.element_names().to_vec(),
                    })
                    .collect(),
                homs: sys
                    .homs()
                    .iter()
                    .map(|(&(i, j), map)| HomInfo {
                        from: sys.indices().name(i).to_string(),
                        to: sys.indices().name(j).to_string(),
                        map: map
                            .entries()
                            .iter()
                            .map(|&(a, b)| {
                                (
                                    sys.components()[i].element_name(a).to_string(),
                                    sys.components()[j].element_name(b).to_string(),
                                )
                            })
                            .collect(),
                    })
                    .collect(),
                reconstruction_verified: entry.reconstruction_verified,
            }
        })
        .collect();

    ReportBody {
        algebra,
        isolated_family,
        frames,
        systems,
        verdict: d.verdict,
        notes: vec![format!(
            "trivial frame {{{}}} excluded from enumeration; only non-trivial \
             systems witness a sum decomposition",
            member_label(d.family.top())
        )],
    }
}

pub fn render_json(body: &ReportBody, timing_ms: u64) -> String {
    let envelope = ReportEnvelope {
        schema: SCHEMA_VERSION,
        report: body,
        timing_ms,
    };
    serde_json::to_string_pretty(&envelope).expect("report bodies serialize")
}

/// The comparable part of the JSON output alone (no envelope, no timing).
pub fn render_json_body(body: &ReportBody) -> String {
    serde_json::to_string_pretty(body).expect("report bodies serialize")
}

/// Human-readable report.
pub fn render_text(alg: &FiniteAlgebra, d: &Decomposition) -> String {
    let mut out = String::new();
    let sig: Vec<String> = alg
        .signature()
        .iter()
        .map(|(n, a)| format!("{n}/{a}"))
        .collect();
    out.push_str(&format!(
        "algebra {}: {} elements, operations: {}\n",
        alg.name(),
        alg.size(),
        sig.join(", ")
    ));
    out.push_str(&format!("isolated family ({} members):\n", d.family.len()));
    for (i, m) in d.family.members().iter().enumerate() {
        out.push_str(&format!("  {} = {}\n", member_label(i), alg.format_set(*m)));
    }
    out.push_str(&format!(
        "frames ({}); the trivial frame {{{}}} is excluded:\n",
        d.frames.len(),
        member_label(d.family.top())
    ));
    for (fi, fa) in d.frames.iter().enumerate() {
        let frame = &fa.frame;
        let label = |pos: usize| member_label(frame.members()[pos]);
        let members: Vec<String> = (0..frame.len()).map(&label).collect();
        let covering: Vec<String> = frame
            .covering()
            .iter()
            .map(|&(i, j)| format!("{} -> {}", label(i), label(j)))
            .collect();
        let comps: Vec<String> = (0..frame.len())
            .map(|pos| {
                format!(
                    "{}- = {}",
                    label(pos),
                    alg.format_set(frame.complement(pos))
                )
            })
            .collect();
        out.push_str(&format!(
            "  frame {}: members {{{}}}; covering: {}; complements: {}\n",
            fi + 1,
            members.join(", "),
            if covering.is_empty() {
                "none".to_string()
            } else {
                covering.join(", ")
            },
            comps.join(", ")
        ));
        out.push_str(&format!("    sound sets: {}\n", fa.sound_sets.len()));
        for o in &fa.obstructions {
            out.push_str(&format!("    {}\n", obstruction_text(alg, d, fi, o)));
        }
    }
    if d.systems.is_empty() {
        out.push_str("systems: none\n");
    } else {
        out.push_str(&format!("systems ({}):\n", d.systems.len()));
        for (si, entry) in d.systems.iter().enumerate() {
            let sys = &entry.system;
            let comps: Vec<String> = sys
                .components()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    format!(
                        "{} = {{{}}}",
                        sys.indices().name(i),
                        c.element_names().join(",")
                    )
                })
                .collect();
            let homs: Vec<String> = sys
                .homs()
                .iter()
                .map(|(&(i, j), map)| {
                    let cells: Vec<String> = map
                        .entries()
                        .iter()
                        .map(|&(a, b)| {
                            format!(
                                "{}->{}",
                                sys.components()[i].element_name(a),
                                sys.components()[j].element_name(b)
                            )
                        })
                        .collect();
                    format!(
                        "phi[{},{}] = {{{}}}",
                        sys.indices().name(i),
                        sys.indices().name(j),
                        cells.join(", ")
                    )
                })
                .collect();
            out.push_str(&format!(
                "  system {} (frame {}): components {}; {}; reconstruction {}\n",
                si + 1,
                entry.frame_index + 1,
                comps.join(", "),
                if homs.is_empty() {
                    "no non-identity homomorphisms".to_string()
                } else {
                    homs.join("; ")
                },
                if entry.reconstruction_verified {
                    "verified"
                } else {
                    "FAILED"
                }
            ));
        }
    }
    out.push_str(&format!(
        "verdict: {} is {}\n",
        alg.name(),
        if d.verdict {
            format!("a Płonka sum ({} direct system(s))", d.systems.len())
        } else {
            "not a Płonka sum".to_string()
        }
    ));
    out
}

/// DOT output: one digraph per frame (Hasse diagram with complement
/// annotations) and one per system semilattice.
pub fn render_dot(alg: &FiniteAlgebra, d: &Decomposition) -> String {
    let mut out = String::new();
    for (fi, fa) in d.frames.iter().enumerate() {
        let frame = &fa.frame;
        let label = |pos: usize| member_label(frame.members()[pos]);
        out.push_str(&format!("digraph frame_{} {{\n", fi + 1));
        out.push_str("  rankdir=BT;\n");
        for pos in 0..frame.len() {
            out.push_str(&format!(
                "  \"{}\" [label=\"{}\\n{}\\ncomplement {}\"];\n",
                label(pos),
                label(pos),
                alg.format_set(frame.member_set(&d.family, pos)),
                alg.format_set(frame.complement(pos))
            ));
        }
        for &(i, j) in frame.covering() {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", label(i), label(j)));
        }
        out.push_str("}\n");
    }
    for (si, entry) in d.systems.iter().enumerate() {
        let sys = &entry.system;
        out.push_str(&format!("digraph system_{} {{\n", si + 1));
        out.push_str("  rankdir=BT;\n");
        for (i, c) in sys.components().iter().enumerate() {
            out.push_str(&format!(
                "  \"{}\" [label=\"{}\\n{{{}}}\"];\n",
                sys.indices().name(i),
                sys.indices().name(i),
                c.element_names().join(",")
            ));
        }
        for (i, j) in sys.indices().covering() {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                sys.indices().name(i),
                sys.indices().name(j)
            ));
        }
        out.push_str("}\n");
    }
    out
}

//! Explicit linear model and CPLEX-LP text export.
//!
//! Variable names: `q_c_i_p`, `R_c_p`, `W_c_f_p`, `psi_c_f_p`, `Y_c`, `Z_c`,
//! `V_c`, `X_l_f`, `Fmax`. All indices are 0-based; the maximum-slot
//! constraint uses the 1-based slot number `f + 1` as coefficient.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::instance::IlpInstance;
use crate::topology::LinkId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(f64, usize)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Objective terms grouped by weight: disruptions, under, over, utilization, max slot.
    pub objective: [Vec<(f64, usize)>; 5],
}

struct Builder {
    variables: Vec<Variable>,
}

impl Builder {
    fn add(&mut self, name: String, kind: VarKind) -> usize {
        self.variables.push(Variable { name, kind });
        self.variables.len() - 1
    }
}

impl LpModel {
    pub fn from_instance(inst: &IlpInstance) -> LpModel {
        let slots = inst.num_slots;
        let horizon = inst.horizon;
        let mut b = Builder { variables: Vec::new() };

        let mut q = Vec::new();
        let mut r = Vec::new();
        let mut w = Vec::new();
        let mut psi = Vec::new();
        let mut y = Vec::new();
        let mut z = Vec::new();
        let mut v = Vec::new();
        for (c, d) in inst.demands.iter().enumerate() {
            let k = d.paths.len();
            q.push(
                (0..k)
                    .map(|p| (0..horizon).map(|i| b.add(format!("q_{c}_{i}_{p}"), VarKind::Binary)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            r.push((0..k).map(|p| b.add(format!("R_{c}_{p}"), VarKind::Binary)).collect::<Vec<_>>());
            w.push(
                (0..k)
                    .map(|p| (0..slots).map(|f| b.add(format!("W_{c}_{f}_{p}"), VarKind::Binary)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            psi.push(
                (0..k)
                    .map(|p| (0..slots).map(|f| b.add(format!("psi_{c}_{f}_{p}"), VarKind::Binary)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            y.push(b.add(format!("Y_{c}"), VarKind::Binary));
            z.push(b.add(format!("Z_{c}"), VarKind::Integer));
            v.push(b.add(format!("V_{c}"), VarKind::Integer));
        }
        let x: Vec<Vec<usize>> = (0..inst.num_links)
            .map(|l| (0..slots).map(|f| b.add(format!("X_{l}_{f}"), VarKind::Binary)).collect())
            .collect();
        let f_max = b.add("Fmax".into(), VarKind::Integer);

        let mut cons = Vec::new();
        let mut push = |name: String, terms: Vec<(f64, usize)>, sense, rhs| {
            cons.push(Constraint { name, terms, sense, rhs });
        };
        for (c, d) in inst.demands.iter().enumerate() {
            let k = d.paths.len();
            push(
                format!("select_{c}"),
                q[c].iter().flatten().map(|&id| (1.0, id)).collect(),
                Sense::Eq,
                1.0,
            );
            for p in 0..k {
                let mut terms: Vec<(f64, usize)> = q[c][p].iter().map(|&id| (1.0, id)).collect();
                terms.push((-1.0, r[c][p]));
                push(format!("path_{c}_{p}"), terms, Sense::Eq, 0.0);
            }
            for p in 0..k {
                let mut terms: Vec<(f64, usize)> = w[c][p].iter().map(|&id| (1.0, id)).collect();
                terms.extend((0..horizon).map(|i| (-(d.rho[p][i] as f64), q[c][p][i])));
                push(format!("count_{c}_{p}"), terms, Sense::Eq, 0.0);
            }
            for p in 0..k {
                for f in 0..slots {
                    let mut terms = vec![(1.0, psi[c][p][f]), (-1.0, w[c][p][f])];
                    if f > 0 {
                        terms.push((1.0, w[c][p][f - 1]));
                    }
                    push(format!("edge_{c}_{f}_{p}"), terms, Sense::Ge, 0.0);
                }
            }
            push(
                format!("block_{c}"),
                psi[c].iter().flatten().map(|&id| (1.0, id)).collect(),
                Sense::Le,
                1.0,
            );
            let mut terms = vec![(1.0, y[c])];
            let rhs = if d.previous.is_some() {
                for p in 0..k {
                    for f in 0..slots {
                        if d.held(f, p) {
                            terms.push((1.0, psi[c][p][f]));
                        }
                    }
                }
                1.0
            } else {
                0.0
            };
            push(format!("disrupt_{c}"), terms, Sense::Eq, rhs);
            for p in 0..k {
                for i in 0..horizon {
                    let rho = d.rho[p][i] as f64;
                    let mut under = vec![(1.0, z[c]), (-rho, r[c][p])];
                    under.extend(w[c][p].iter().map(|&id| (1.0, id)));
                    push(format!("under_{c}_{i}_{p}"), under, Sense::Ge, 0.0);
                    let mut over = vec![(1.0, v[c]), (rho, r[c][p])];
                    over.extend(w[c][p].iter().map(|&id| (-1.0, id)));
                    push(format!("over_{c}_{i}_{p}"), over, Sense::Ge, 0.0);
                }
            }
        }
        for l in 0..inst.num_links {
            for f in 0..slots {
                let mut terms = Vec::new();
                for (c, d) in inst.demands.iter().enumerate() {
                    for p in 0..d.paths.len() {
                        if d.uses_link(p, LinkId(l)) {
                            terms.push((1.0, w[c][p][f]));
                        }
                    }
                }
                terms.push((-1.0, x[l][f]));
                push(format!("overlap_{l}_{f}"), terms, Sense::Le, 0.0);
            }
        }
        for l in 0..inst.num_links {
            for f in 0..slots {
                push(
                    format!("maxslot_{l}_{f}"),
                    vec![((f + 1) as f64, x[l][f]), (-1.0, f_max)],
                    Sense::Le,
                    0.0,
                );
            }
        }

        let k = inst.coefficients();
        let objective = [
            y.iter().map(|&id| (k[0], id)).collect(),
            z.iter().map(|&id| (k[1], id)).collect(),
            v.iter().map(|&id| (k[2], id)).collect(),
            x.iter().flatten().map(|&id| (k[3], id)).collect(),
            vec![(k[4], f_max)],
        ];
        LpModel { variables: b.variables, constraints: cons, objective }
    }

    /// CPLEX LP text. The objective is written one weighted group per line.
    pub fn to_lp_string(&self, inst: &IlpInstance) -> String {
        let w = inst.weights.0;
        let mut out = String::new();
        let _ = writeln!(out, "\\ multi-period RSA program");
        let _ = writeln!(
            out,
            "\\ weights: w1={} w2={} w3={} w4={} w5={}",
            w[0], w[1], w[2], w[3], w[4]
        );
        let _ = writeln!(
            out,
            "\\ demands={} links={} slots={} horizon={} variables={} constraints={}",
            inst.demands.len(),
            inst.num_links,
            inst.num_slots,
            inst.horizon,
            self.variables.len(),
            self.constraints.len()
        );
        out.push_str("Minimize\n obj:");
        for (g, group) in self.objective.iter().enumerate() {
            out.push_str(if g == 0 { " " } else { "\n  + " });
            self.write_terms(&mut out, group);
            if group.is_empty() {
                out.push_str("0 Fmax");
            }
        }
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}: ", c.name);
            self.write_terms(&mut out, &c.terms);
            let sense = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {sense} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for v in &self.variables {
            if v.kind == VarKind::Integer {
                let _ = writeln!(out, " {} >= 0", v.name);
            }
        }
        out.push_str("Binaries\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Binary) {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("Generals\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Integer) {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("End\n");
        out
    }

    fn write_terms(&self, out: &mut String, terms: &[(f64, usize)]) {
        for (n, &(coef, id)) in terms.iter().enumerate() {
            let name = &self.variables[id].name;
            if n == 0 {
                if coef < 0.0 {
                    let _ = write!(out, "- {} {name}", -coef);
                } else {
                    let _ = write!(out, "{coef} {name}");
                }
            } else if coef < 0.0 {
                let _ = write!(out, " - {} {name}", -coef);
            } else {
                let _ = write!(out, " + {coef} {name}");
            }
        }
    }
}

pub fn export_lp(inst: &IlpInstance, path: &Path) -> io::Result<()> {
    std::fs::write(path, LpModel::from_instance(inst).to_lp_string(inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::instance::{IlpDemand, PreviousAllocation, Weights};
    use crate::spectrum::tests::path;
    use crate::ConnId;

    fn tiny() -> IlpInstance {
        IlpInstance {
            demands: vec![
                IlpDemand {
                    conn: ConnId(0),
                    paths: vec![path(0, &[0]), path(1, &[1])],
                    rho: vec![vec![1, 2], vec![2, 3]],
                    previous: Some(PreviousAllocation { path: Some(0), start: 1, width: 2 }),
                },
                IlpDemand {
                    conn: ConnId(1),
                    paths: vec![path(0, &[0, 1])],
                    rho: vec![vec![2, 2]],
                    previous: None,
                },
            ],
            weights: Weights::SC2,
            num_slots: 5,
            num_links: 2,
            horizon: 2,
        }
    }

    #[test]
    fn text_layout() {
        let inst = tiny();
        let model = LpModel::from_instance(&inst);
        let text = model.to_lp_string(&inst);
        assert!(text.starts_with("\\ multi-period RSA program\n\\ weights: w1=20 w2=2 w3=5 w4=0.01 w5=10\n"));
        let obj = text.split("Minimize\n").nth(1).unwrap().split("Subject To").next().unwrap();
        assert_eq!(obj.lines().count(), 5);
        let declared = text
            .split("Binaries\n")
            .nth(1)
            .unwrap()
            .lines()
            .filter(|l| l.starts_with(' '))
            .count();
        assert_eq!(declared, inst.variable_count());
        assert!(text.contains(" disrupt_0: 1 Y_0 + 1 psi_0_1_0 + 1 psi_0_2_0 = 1\n"));
        assert!(text.contains(" disrupt_1: 1 Y_1 = 0\n"));
        assert!(text.contains(" maxslot_1_4: 5 X_1_4 - 1 Fmax <= 0\n"));
    }

    #[test]
    fn counts_for_mixed_path_sets() {
        let inst = tiny();
        // demand 0 has two paths, demand 1 one
        let vars = (2 * 2 + 2 * 2 * 5 + 2 + 3) + (2 + 2 * 5 + 1 + 3) + 2 * 5 + 1;
        let cons = (3 + 2 * 2 + 2 * 5 + 2 * 2 * 2) + (3 + 2 + 5 + 2 * 2) + 2 * 2 * 5;
        assert_eq!(inst.variable_count(), vars);
        assert_eq!(inst.constraint_count(), cons);
    }
}

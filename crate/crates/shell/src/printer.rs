//! Canonical text for declarations. Parsing the output gives back the same
//! declarations.

use std::fmt::Write;

use crate::ast::{Decl, DeclBody, SetRef, Table};

fn set_ref(s: &SetRef) -> String {
    match s {
        SetRef::Literal(elements) => format!("{{{}}}", elements.join(", ")),
        SetRef::Expr(e) => e.to_string(),
    }
}

/// Writes `{ ... }` with one entry per line at the given indent.
fn block(out: &mut String, indent: &str, lines: &[String]) {
    if lines.is_empty() {
        out.push_str("{}\n");
        return;
    }
    out.push_str("{\n");
    for (k, line) in lines.iter().enumerate() {
        let sep = if k + 1 < lines.len() { "," } else { "" };
        let _ = writeln!(out, "{indent}  {line}{sep}");
    }
    let _ = writeln!(out, "{indent}}}");
}

fn table_lines(t: &Table) -> Vec<String> {
    t.iter().map(|(a, b)| format!("{a} -> {b}")).collect()
}

fn decl(out: &mut String, d: &Decl) {
    let name = &d.name;
    match &d.body {
        DeclBody::Set(s) => {
            let _ = writeln!(out, "set {name} = {}", set_ref(s));
        }
        DeclBody::Fn { dom, cod, table } => {
            let _ = write!(out, "fn {name} : {} -> {} ", set_ref(dom), set_ref(cod));
            block(out, "", &table_lines(table));
        }
        DeclBody::System { states, inputs, update } => {
            let _ = writeln!(out, "system {name} {{");
            let _ = writeln!(out, "  states {}", set_ref(states));
            let _ = writeln!(out, "  inputs {}", set_ref(inputs));
            out.push_str("  update ");
            block(out, "  ", &table_lines(update));
            out.push_str("}\n");
        }
        DeclBody::Map {
            source,
            target,
            states,
            inputs,
        } => {
            let _ = writeln!(out, "map {name} : {} -> {} {{", source.name, target.name);
            out.push_str("  states ");
            block(out, "  ", &table_lines(states));
            if let Some(inputs) = inputs {
                out.push_str("  inputs ");
                block(out, "  ", &table_lines(inputs));
            }
            out.push_str("}\n");
        }
        DeclBody::RelKernel { dom, cod, rows } => {
            let _ = write!(out, "relkernel {name} : {} -> {} ", set_ref(dom), set_ref(cod));
            let lines: Vec<String> = rows.iter().map(|(x, ys)| format!("{x} -> {{{}}}", ys.join(", "))).collect();
            block(out, "", &lines);
        }
        DeclBody::StochKernel { dom, cod, rows } => {
            let _ = write!(out, "stochkernel {name} : {} -> {} ", set_ref(dom), set_ref(cod));
            let lines: Vec<String> = rows
                .iter()
                .map(|(x, ws)| {
                    let ws: Vec<String> = ws.iter().map(|(y, w)| format!("{y}: {w}")).collect();
                    format!("{x} -> {{{}}}", ws.join(", "))
                })
                .collect();
            block(out, "", &lines);
        }
        DeclBody::Problem {
            env,
            plant,
            controller,
            targets,
            attractor,
        } => {
            let _ = writeln!(out, "problem {name} {{");
            let _ = writeln!(out, "  env {}", env.name);
            let _ = writeln!(out, "  plant {}", plant.name);
            let _ = writeln!(out, "  controller {}", controller.name);
            let _ = writeln!(out, "  targets {{{}}}", targets.join(", "));
            if let Some(a) = attractor {
                let _ = writeln!(out, "  attractor {{{}}}", a.join(", "));
            }
            out.push_str("}\n");
        }
        DeclBody::Reasoner {
            params,
            observations,
            hidden,
            update,
            interpretation,
            model,
        } => {
            let _ = writeln!(out, "reasoner {name} {{");
            let _ = writeln!(out, "  params {}", set_ref(params));
            let _ = writeln!(out, "  observations {}", set_ref(observations));
            let _ = writeln!(out, "  hidden {}", set_ref(hidden));
            let _ = writeln!(out, "  update {}", update.name);
            let _ = writeln!(out, "  interpretation {}", interpretation.name);
            let _ = writeln!(out, "  model {}", model.name);
            out.push_str("}\n");
        }
    }
}

/// Prints declarations separated by blank lines.
pub fn print_decls(decls: &[Decl]) -> String {
    let mut out = String::new();
    for (k, d) in decls.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        decl(&mut out, d);
    }
    out
}

//! Canonical source rendering. One declaration or statement per line,
//! two-space indent per nesting level; reparsing yields an equal document.

use std::fmt::Write;

use super::{Endpoint, InstanceKind, Message, MscDocument, Stmt};

pub(super) fn pretty(doc: &MscDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "msc {}", doc.name);
    for inst in &doc.instances {
        let kind = match inst.kind {
            InstanceKind::Port => "port",
            InstanceKind::Sut => "sut",
        };
        let _ = writeln!(out, "inst {} {}", inst.name, kind);
    }
    stmts(&mut out, &doc.body, 0);
    out
}

fn endpoint(ep: &Endpoint) -> &str {
    match ep {
        Endpoint::Inst(n) => n,
        Endpoint::Env => super::ENV_NAME,
    }
}

fn message(out: &mut String, m: &Message, indent: usize) {
    let _ = writeln!(
        out,
        "{:indent$}msg {} from {} to {}",
        "",
        m.msg,
        endpoint(&m.from),
        endpoint(&m.to),
        indent = indent
    );
}

fn stmts(out: &mut String, body: &[Stmt], indent: usize) {
    for stmt in body {
        match stmt {
            Stmt::Message(m) => message(out, m, indent),
            Stmt::Coregion { instance, messages } => {
                let _ = writeln!(out, "{:indent$}coregion {} {{", "", instance, indent = indent);
                for m in messages {
                    message(out, m, indent + 2);
                }
                let _ = writeln!(out, "{:indent$}}}", "", indent = indent);
            }
            Stmt::Alt { branches } => {
                let _ = writeln!(out, "{:indent$}alt {{", "", indent = indent);
                for b in branches {
                    let _ = writeln!(out, "{:indent$}{{", "", indent = indent + 2);
                    stmts(out, b, indent + 4);
                    let _ = writeln!(out, "{:indent$}}}", "", indent = indent + 2);
                }
                let _ = writeln!(out, "{:indent$}}}", "", indent = indent);
            }
            Stmt::Order { from, to } => {
                let _ = writeln!(out, "{:indent$}order {} -> {}", "", from, to, indent = indent);
            }
            Stmt::Verdict(v) => {
                let _ = writeln!(out, "{:indent$}verdict {}", "", v, indent = indent);
            }
        }
    }
}

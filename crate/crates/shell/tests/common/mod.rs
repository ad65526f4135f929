#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// The workspace root; commands run there so fixture paths are relative.
pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn fixtures() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(workspace().join("fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sys"))
        .collect();
    out.sort();
    out
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the built binary from the workspace root.
pub fn impcheck(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_impcheck"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub struct Golden {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

pub const GOLDEN: &[Golden] = &[
    Golden {
        name: "check_model_e1",
        args: &["check", "model", "fixtures/e1.sys", "--map", "mu"],
        code: 0,
    },
    Golden {
        name: "check_model_e1_broken",
        args: &["check", "model", "fixtures/e1_broken.sys", "--map", "mu"],
        code: 1,
    },
    Golden {
        name: "check_model_e1_broken_json",
        args: &["--format", "json", "check", "model", "fixtures/e1_broken.sys", "--map", "mu"],
        code: 1,
    },
    Golden {
        name: "check_map_e1",
        args: &["check", "map", "fixtures/e1.sys", "--name", "mu"],
        code: 0,
    },
    Golden {
        name: "check_system_clock4",
        args: &["check", "system", "fixtures/e1.sys", "--name", "Clock4"],
        code: 0,
    },
    Golden {
        name: "imp_verify_e2",
        args: &["imp", "verify", "fixtures/e2.sys", "--problem", "tracking"],
        code: 0,
    },
    Golden {
        name: "imp_verify_e2_input_dependent",
        args: &["imp", "verify", "fixtures/e2_input_dependent.sys", "--problem", "tracking"],
        code: 1,
    },
    Golden {
        name: "interp_derive_e1",
        args: &["interp", "derive", "fixtures/e1.sys", "--map", "mu"],
        code: 0,
    },
    Golden {
        name: "interp_check_e1_reasoner",
        args: &["interp", "check", "fixtures/e1_reasoner.sys", "--reasoner", "r"],
        code: 0,
    },
    Golden {
        name: "kernel_eval_closure",
        args: &["kernel", "eval", "fixtures/e1.sys", "--expr", "fn mu ; pre mu"],
        code: 0,
    },
    Golden {
        name: "kernel_eval_type_mismatch",
        args: &["kernel", "eval", "fixtures/e1.sys", "--expr", "pre mu ; fn mu", "--against", "fn mu ; pre mu"],
        code: 2,
    },
    Golden {
        name: "kernel_eval_not_equal",
        args: &["kernel", "eval", "fixtures/kernels.sys", "--expr", "fn parity", "--against", "noisy"],
        code: 1,
    },
    Golden {
        name: "kernel_eval_joint",
        args: &[
            "kernel", "eval", "fixtures/kernels.sys", "--flavor", "stoch", "--expr",
            "prior ; copy[B] ; (id[B] (x) flip)",
        ],
        code: 0,
    },
    Golden {
        name: "kernel_eval_dangling",
        args: &["kernel", "eval", "fixtures/e1.sys", "--expr", "fn mu ⊗"],
        code: 2,
    },
    Golden {
        name: "parse_lexical",
        args: &["check", "system", "crates/shell/tests/data/lexical.sys", "--name", "S"],
        code: 2,
    },
    Golden {
        name: "parse_syntax",
        args: &["check", "system", "crates/shell/tests/data/syntax.sys", "--name", "S"],
        code: 2,
    },
    Golden {
        name: "parse_reference",
        args: &["check", "system", "crates/shell/tests/data/reference.sys", "--name", "S"],
        code: 2,
    },
    Golden {
        name: "parse_validation",
        args: &["check", "system", "crates/shell/tests/data/validation.sys", "--name", "S"],
        code: 2,
    },
    Golden {
        name: "unknown_declaration",
        args: &["check", "model", "fixtures/e1.sys", "--map", "nu"],
        code: 2,
    },
];

/// Runs one golden case; with `IMPCHECK_BLESS` set the expected output is
/// rewritten instead of compared.
pub fn check_golden(g: &Golden) -> Result<(), String> {
    let run = impcheck(g.args);
    let actual = format!("{}{}", run.stdout, run.stderr);
    let path = workspace().join("crates/shell/tests/golden").join(format!("{}.out", g.name));
    if std::env::var_os("IMPCHECK_BLESS").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    if run.code != g.code {
        return Err(format!("{}: exit {} instead of {}\n{actual}", g.name, run.code, g.code));
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != actual {
        return Err(format!("{}: output differs\n--- expected\n{expected}--- actual\n{actual}", g.name));
    }
    Ok(())
}

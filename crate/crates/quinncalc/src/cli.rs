//! Command-line front end: loads the DSL files, runs validations and
//! evaluations, and reproduces the worked numbers in one command.
//!
//! Exit codes: 0 on success or an equal/check-passing result, 1 on a failed
//! check, 2 on usage or parse errors.

use crate::ambialgebra::{trace_unit_general, trace_unit_solve, unit_e};
use crate::category::{parse_category_file, validate, FusionCategory};
use crate::presentation::{
    apply_move, parse_present_script, parse_presentation, smith_invariants, Presentation,
};
use crate::roottree::{parse_tree, RootTree, StateVector};
use crate::script::{
    builtin, check_relation, evaluate, evaluate_trace, parse_script, BubbleSide, ChainDescriptor,
    MoveScript, bubble_relation, new_sequence, vertex_pass,
};
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::fs;

#[derive(Parser)]
#[command(name = "quinncalc", version, about = "Exact roottree calculus over prime fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every category axiom and report pass/fail per axiom.
    ValidateCategory {
        /// Category file path, or `c5` for the built-in category.
        #[arg(long, default_value = "c5")]
        category: String,
        /// Asserts the prime of a category file.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Solve the ambialgebra trace unit and print it.
    TraceUnit {
        #[arg(long, default_value = "c5")]
        category: String,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Evaluate a move script on a start roottree.
    Eval {
        #[arg(long, default_value = "c5")]
        category: String,
        #[arg(long)]
        p: Option<u64>,
        /// Script file, inline script text, or a built-in name
        /// (newseq, vertexpass, bubble).
        #[arg(long)]
        script: String,
        /// Start roottree: a file or an inline tree expression.
        #[arg(long)]
        start: String,
        /// Dump the state after every move.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate two scripts on every admissible start and compare.
    CheckRelation {
        script_a: String,
        script_b: String,
        #[arg(long, default_value = "c5")]
        category: String,
        #[arg(long)]
        p: Option<u64>,
        /// Print the per-start output table.
        #[arg(long)]
        trace: bool,
    },
    /// Presentation tooling.
    Present {
        #[command(subcommand)]
        cmd: PresentCmd,
    },
    /// Recompute every number of the worked examples and compare.
    ReproducePaper,
}

#[derive(Subcommand)]
enum PresentCmd {
    /// Apply a transformation script to a presentation.
    Transform {
        /// Inline `<a,b | ...>` text or a file path.
        #[arg(long)]
        presentation: String,
        /// Script file or inline script text.
        #[arg(long)]
        script: String,
    },
}

/// Entry point shared by the binary and the tests. Returns the exit code
/// and everything that would be printed.
pub fn run(args: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let color = std::env::var("QUINNCALC_COLOR").map(|v| v == "1").unwrap_or(false);
    match dispatch(cli, color) {
        Ok((code, out)) => (code, out),
        Err(msg) => (2, format!("error: {msg}\n")),
    }
}

fn dispatch(cli: Cli, color: bool) -> Result<(i32, String), String> {
    match cli.cmd {
        Cmd::ValidateCategory { category, p } => {
            let cat = load_category(&category, p)?;
            let report = validate(&cat);
            let code = if report.all_pass() { 0 } else { 1 };
            Ok((code, format!("{report}")))
        }
        Cmd::TraceUnit { category, p } => {
            let cat = load_category(&category, p)?;
            match trace_unit_solve(&cat) {
                Ok(c) => Ok((0, format!("c = {}\n", c.render(&cat)))),
                Err(e) => Ok((1, format!("no trace unit: {e}\n"))),
            }
        }
        Cmd::Eval { category, p, script, start, trace } => {
            let cat = load_category(&category, p)?;
            let script = load_script(&script)?;
            let start = load_start(&cat, &start)?;
            let sv = StateVector::from_tree(&cat, &start);
            if trace {
                let (out, lines) =
                    evaluate_trace(&cat, &script, &sv).map_err(|e| e.to_string())?;
                let mut text = format!("start: {}\n", sv.render(&cat));
                for l in lines {
                    text.push_str(&l);
                    text.push('\n');
                }
                let _ = writeln!(text, "result: {}", out.render(&cat));
                Ok((0, text))
            } else {
                let out = evaluate(&cat, &script, &sv).map_err(|e| e.to_string())?;
                Ok((0, format!("{}\n", out.render(&cat))))
            }
        }
        Cmd::CheckRelation { script_a, script_b, category, p, trace } => {
            let cat = load_category(&category, p)?;
            let a = load_script(&script_a)?;
            let b = load_script(&script_b)?;
            let report = check_relation(&cat, &a, &b, None).map_err(|e| e.to_string())?;
            let mut out = String::new();
            if trace {
                out.push_str(&report.render(&cat));
            } else if report.equal {
                let _ = writeln!(out, "EQUAL over {} starts", report.rows.len());
            } else {
                let idx = report.first_counterexample.unwrap();
                let row = &report.rows[idx];
                let _ = writeln!(
                    out,
                    "NOT EQUAL at start {}",
                    crate::roottree::print_tree(&cat, row.start.tree())
                );
                let _ = writeln!(out, "  A: {}", row.out_a.render(&cat));
                let _ = writeln!(out, "  B: {}", row.out_b.render(&cat));
            }
            Ok((if report.equal { 0 } else { 1 }, out))
        }
        Cmd::Present { cmd: PresentCmd::Transform { presentation, script } } => {
            let p = load_presentation(&presentation)?;
            let text = load_text(&script);
            let moves = parse_present_script(&text).map_err(|e| e.to_string())?;
            let before = smith_invariants(&p);
            let mut out = String::new();
            let _ = writeln!(out, "before: {p}");
            let _ = writeln!(out, "smith before: {before:?}");
            let mut q = p;
            for mv in &moves {
                q = apply_move(&q, mv).map_err(|e| e.to_string())?;
            }
            let after = smith_invariants(&q);
            let _ = writeln!(out, "after: {q}");
            let _ = writeln!(out, "smith after: {after:?}");
            Ok((0, out))
        }
        Cmd::ReproducePaper => {
            let (ok, out) = reproduce_paper_report(color);
            Ok((if ok { 0 } else { 1 }, out))
        }
    }
}

fn load_category(spec: &str, p_flag: Option<u64>) -> Result<FusionCategory, String> {
    let cat = if spec == "c5" {
        if p_flag.is_some_and(|p| p != 5) {
            return Err("--p contradicts the built-in category (p = 5)".into());
        }
        FusionCategory::builtin_c5()
    } else {
        let text = fs::read_to_string(spec)
            .map_err(|e| format!("cannot read category file `{spec}`: {e}"))?;
        let cat = parse_category_file(&text).map_err(|e| e.to_string())?;
        if let Some(p) = p_flag {
            if cat.field().prime() != p {
                return Err(format!(
                    "--p {} contradicts the category file (prime {})",
                    p,
                    cat.field().prime()
                ));
            }
        }
        cat
    };
    Ok(cat)
}

fn load_text(spec: &str) -> String {
    match fs::read_to_string(spec) {
        Ok(t) => t,
        Err(_) => spec.to_string(),
    }
}

fn load_script(spec: &str) -> Result<MoveScript, String> {
    if let Some(s) = builtin(spec) {
        return Ok(s);
    }
    let text = load_text(spec);
    parse_script(&text).map_err(|e| e.to_string())
}

fn load_start(cat: &FusionCategory, spec: &str) -> Result<RootTree, String> {
    let text = load_text(spec);
    parse_tree(cat, text.trim()).map_err(|e| e.to_string())
}

fn load_presentation(spec: &str) -> Result<Presentation, String> {
    let text = load_text(spec);
    parse_presentation(text.trim()).map_err(|e| e.to_string())
}

struct Table {
    lines: Vec<(bool, String)>,
    color: bool,
}

impl Table {
    fn new(color: bool) -> Self {
        Table { lines: Vec::new(), color }
    }

    fn push(&mut self, ok: bool, what: &str, expected: &str, computed: &str) {
        self.lines
            .push((ok, format!("{what:<46} expected {expected:<14} computed {computed}")));
    }

    fn render(&self) -> (bool, String) {
        let mut out = String::new();
        let mut ok_count = 0;
        for (ok, line) in &self.lines {
            let mark = match (ok, self.color) {
                (true, false) => "[ok]  ".to_string(),
                (false, false) => "[FAIL]".to_string(),
                (true, true) => "\x1b[32m[ok]\x1b[0m  ".to_string(),
                (false, true) => "\x1b[31m[FAIL]\x1b[0m".to_string(),
            };
            out.push_str(&format!("{mark} {line}\n"));
            if *ok {
                ok_count += 1;
            }
        }
        let all = ok_count == self.lines.len();
        out.push_str(&format!("{} checks: {} ok, {} failed\n", self.lines.len(), ok_count, self.lines.len() - ok_count));
        (all, out)
    }
}

/// Recomputes every number the worked examples report, in a fixed order
/// with deterministic formatting.
pub fn reproduce_paper_report(color: bool) -> (bool, String) {
    let cat = FusionCategory::builtin_c5();
    let mut t = Table::new(color);
    let mut out = String::from("reproduce-paper: built-in category c5 (p = 5)\n");

    let report = validate(&cat);
    t.push(report.all_pass(), "category axioms (incl. pentagon)", "pass", if report.all_pass() { "pass" } else { "FAIL" });

    let a = cat.lookup("A").unwrap();
    let one = cat.lookup("1").unwrap();
    let fused = cat.fuse(a, a).unwrap();
    let fused_names: Vec<&str> = fused.iter().map(|&x| cat.name(x)).collect();
    t.push(fused_names == ["1", "A"], "fusion A (x) A", "1 (+) A", &fused_names.join(" (+) "));

    let blk = cat.f_block(a, a, a, a).unwrap();
    let entries = (
        blk.entry(one, one).unwrap(),
        blk.entry(one, a).unwrap(),
        blk.entry(a, one).unwrap(),
        blk.entry(a, a).unwrap(),
    );
    t.push(entries == (2, 4, 3, 3), "F(A,A,A;A) entries", "2,4,3,3", &format!("{},{},{},{}", entries.0, entries.1, entries.2, entries.3));
    let sq = cat.field().mat_mul(&blk.mat, &blk.mat);
    let is_id = sq == vec![vec![1, 0], vec![0, 1]];
    t.push(is_id, "F(A,A,A;A) squared", "identity", if is_id { "identity" } else { "other" });

    t.push(cat.coform_scalar(a) == 3, "coform scalar at A", "3", &cat.coform_scalar(a).to_string());

    let snakes_ok = cat.object_ids().all(|x| {
        crate::category::snake_scalars(&cat, x).map(|(f, i)| f == 1 && i == 1).unwrap_or(false)
    });
    t.push(snakes_ok, "coform-assoc-form scalar at 1 and A", "1", if snakes_ok { "1" } else { "other" });

    let s = crate::ambialgebra::structure_scalars(&cat).unwrap();
    t.push(s.m(a) == 2, "product factor at A", "2", &s.m(a).to_string());
    t.push(s.delta(a) == 1, "coproduct factor at A (3*2)", "1", &s.delta(a).to_string());

    let e = unit_e(&cat).unwrap();
    t.push(e.render(&cat) == "I + 3A", "ambialgebra unit e", "I + 3A", &e.render(&cat));
    let c = trace_unit_solve(&cat).unwrap();
    t.push(c.render(&cat) == "I + 4A", "trace unit c (solve)", "I + 4A", &c.render(&cat));
    let g = trace_unit_general(&cat).unwrap();
    t.push(g == c, "trace unit c (general formula)", "I + 4A", &g.render(&cat));

    let d = ChainDescriptor::example();
    let newseq = new_sequence(&d).unwrap();
    let pass = vertex_pass(&d).unwrap();
    let examples: [(&str, &str, &[(&str, u64)]); 5] = [
        (
            "example 1",
            "( ( A ( A A ):A ):A A ):1",
            &[("( A ( A ( A A ):1 ):A ):1", 4), ("( A ( A ( A A ):A ):A ):1", 3)],
        ),
        (
            "example 2",
            "( ( A ( A A ):1 ):A A ):1",
            &[("( A ( A ( A A ):1 ):A ):1", 2), ("( A ( A ( A A ):A ):A ):1", 3)],
        ),
        (
            "example 3",
            "( ( A ( A A ):A ):1 1 ):1",
            &[("( A ( A ( A 1 ):A ):A ):1", 1)],
        ),
        (
            "example 4",
            "( ( A ( 1 1 ):1 ):A A ):1",
            &[("( A ( 1 ( 1 A ):A ):A ):1", 1)],
        ),
        (
            "all-unit start",
            "( ( 1 ( 1 1 ):1 ):1 1 ):1",
            &[("( 1 ( 1 ( 1 1 ):1 ):1 ):1", 1)],
        ),
    ];
    for (name, start_text, ends) in examples {
        let start = StateVector::from_tree(&cat, &parse_tree(&cat, start_text).unwrap());
        let expected: Vec<String> = ends.iter().map(|(_, k)| k.to_string()).collect();
        for (script, label) in [(&newseq, "new sequence"), (&pass, "vertex pass")] {
            let result = evaluate(&cat, script, &start);
            let (ok, got) = match result {
                Ok(sv) => {
                    let coeffs: Vec<u64> = ends
                        .iter()
                        .map(|(tree, _)| sv.coeff_of(parse_tree(&cat, tree).unwrap().tree()))
                        .collect();
                    let exact = coeffs.iter().zip(ends).all(|(&got, (_, want))| got == *want)
                        && sv.len() == ends.len();
                    let got: Vec<String> = coeffs.iter().map(u64::to_string).collect();
                    (exact, got.join(", "))
                }
                Err(e) => (false, format!("error: {e}")),
            };
            t.push(ok, &format!("{name}: {label} coefficients"), &expected.join(", "), &got);
        }
    }

    for (side, label) in [(BubbleSide::Right, "right"), (BubbleSide::Left, "left")] {
        let script = bubble_relation(side);
        let mut ok = true;
        for start_text in ["( A A ):1", "( 1 1 ):1"] {
            let start = StateVector::from_tree(&cat, &parse_tree(&cat, start_text).unwrap());
            match evaluate(&cat, &script, &start) {
                Ok(sv) => ok &= sv == start,
                Err(_) => ok = false,
            }
        }
        t.push(ok, &format!("bubble relation ({label}) is the identity"), "identity", if ok { "identity" } else { "other" });
    }

    let relation = check_relation(&cat, &newseq, &pass, None);
    let (ok, got) = match relation {
        Ok(r) => (r.equal && r.rows.len() == 13, format!("{} over {} starts", if r.equal { "EQUAL" } else { "NOT EQUAL" }, r.rows.len())),
        Err(e) => (false, format!("error: {e}")),
    };
    t.push(ok, "new sequence = vertex pass on every start", "EQUAL over 13 starts", &got);

    let (all_ok, body) = t.render();
    out.push_str(&body);
    (all_ok, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cmd(args: &[&str]) -> (i32, String) {
        let full: Vec<String> =
            std::iter::once("quinncalc".to_string()).chain(args.iter().map(|s| s.to_string())).collect();
        run(&full)
    }

    #[test]
    fn trace_unit_command() {
        let (code, out) = run_cmd(&["trace-unit", "--category", "c5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "c = I + 4A\n");
    }

    #[test]
    fn validate_command() {
        let (code, out) = run_cmd(&["validate-category"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("pentagon"));
    }

    #[test]
    fn check_relation_command() {
        let (code, out) = run_cmd(&["check-relation", "newseq", "vertexpass"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out, "EQUAL over 13 starts\n");
    }

    #[test]
    fn eval_command_inline() {
        let (code, out) = run_cmd(&[
            "eval",
            "--script",
            "vertexpass",
            "--start",
            "( ( A ( A A ):A ):A A ):1",
        ]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out, "4 * ( A ( A ( A A ):1 ):A ):1 + 3 * ( A ( A ( A A ):A ):A ):1\n");
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _) = run_cmd(&["eval", "--script", "nope missing start"]);
        assert_eq!(code, 2);
        let (code, _) = run_cmd(&["no-such-command"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn reproduce_paper_is_deterministic_and_green() {
        let (ok_a, out_a) = reproduce_paper_report(false);
        let (ok_b, out_b) = reproduce_paper_report(false);
        assert!(ok_a, "{out_a}");
        assert_eq!(ok_a, ok_b);
        assert_eq!(out_a, out_b);
    }

    #[test]
    fn present_transform_command() {
        let (code, out) = run_cmd(&[
            "present",
            "transform",
            "--presentation",
            "<a,b | a b A B, a a b>",
            "--script",
            "conj 1 by \"ab\"\ninv 2\nmulR 1 2",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("smith before: [1, 0]"), "{out}");
        assert!(out.contains("smith after: [1, 0]"), "{out}");
    }
}

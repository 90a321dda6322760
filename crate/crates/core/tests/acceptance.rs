//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails when
//! any criterion does.

mod common;

use std::collections::BTreeMap;
use std::io::Cursor;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tagmap::mtree::{
    build_mtree, check_definition_holes, check_hierarchical, check_nondisjointness,
    InconsistencyKind,
};
use tagmap::resolver::{render_query, resolve};
use tagmap::retagger::{retag_stream, CorpusFormat};
use tagmap::specexpr::{resolve as resolve_names, to_dnf};
use tagmap::typegraph::{FeatureId, NodeId, ValueId};
use tagmap::{cli, denote, parse_spec, typecheck, ClassSet};

const QUERY: &str = "[(vtype=con & vform=inf) | (vtype=prim & tense=past)]";
const EXPECTED: &str = r#"[((pos = "VB" & word != "be|do|have")|(pos = "VBD" & word = "was|were|had|did")|(pos = "VBN" & word = "been|had|done"))]"#;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn query_translation() -> Outcome {
    let start = Instant::now();
    let g = graph();
    let rs = rules(&g, UPENN_RULES);
    let mt = build_mtree(&rs, &g);
    let q = typecheck(&parse_spec(QUERY).unwrap(), &g).map_err(|e| e.to_string())?;
    let r = resolve(&q, &mt, &rs);
    let text = render_query(&r);
    let elapsed = start.elapsed();

    let first = text.lines().next().unwrap_or_default();
    check(squash(first) == squash(EXPECTED), || format!("got {first}"))?;
    // finite subjunctive and imperative content verbs, by direct inspection
    let g_classes = g.terminal_classes();
    let fid = |n: &str| FeatureId(g.features().iter().position(|d| d.name == n).unwrap());
    let val =
        |f: FeatureId, v: &str| ValueId(g.feature(f).values.iter().position(|x| x == v).unwrap());
    let (vtype, mood) = (fid("vtype"), fid("mood"));
    let want = ClassSet::from_indices(
        g_classes.len(),
        g_classes.iter().enumerate().filter_map(|(i, c)| {
            let finite =
                c.value(mood) == Some(val(mood, "subj")) || c.value(mood) == Some(val(mood, "imp"));
            (c.value(vtype) == Some(val(vtype, "con")) && finite).then_some(i)
        }),
    );
    check(
        r.noise.tags.len() == 1 && r.noise.tags[0].tag == "VB",
        || format!("noise on {:?}", r.noise.tags),
    )?;
    let cover = r.noise.tags[0].cover.text().to_string();
    let redenoted = denote(&parse_spec(&cover).unwrap(), &g).unwrap();
    check(redenoted == want, || {
        format!("noise cover `{cover}` denotes {redenoted:?}")
    })?;
    check(text.contains(&format!("WARN noise VB: {cover}")), || {
        "noise warning missing".into()
    })?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("noise: {cover} ({} ms)", elapsed.as_millis()))
}

fn type_errors() -> Outcome {
    let g = graph();
    let bad = parse_spec("[pos = v & (vform = fin | case != gen)]").unwrap();
    let err = match typecheck(&bad, &g) {
        Ok(_) => return Err("ill-typed spec accepted".into()),
        Err(e) => e.to_string(),
    };
    check(err.contains("are not type compatible"), || err.clone())?;
    check(err.contains("pos=v") && err.contains("case"), || {
        err.clone()
    })?;
    typecheck(
        &parse_spec("[pos = v & vtype = aux & pers = 3]").unwrap(),
        &g,
    )
    .map_err(|e| format!("aux spec rejected: {e}"))?;
    Ok(err)
}

fn mapping_diagnostics() -> Outcome {
    let g = graph();
    let count = |v: &[tagmap::mtree::Inconsistency], k| v.iter().filter(|d| d.kind == k).count();

    let rs = rules(&g, &without_lines(&["[pos = 'SYM']"]));
    let holes = check_definition_holes(&rs, &g);
    check(
        count(&holes, InconsistencyKind::DefinitionHoleSource) == 1,
        || format!("(a) {holes:?}"),
    )?;

    let rs = rules(&g, &without_lines(&["pron"]));
    let holes = check_definition_holes(&rs, &g);
    let target: Vec<_> = holes
        .iter()
        .filter(|d| d.kind == InconsistencyKind::DefinitionHoleTarget)
        .collect();
    check(target.len() == 1, || format!("(b) {holes:?}"))?;
    let pron = brute_denote(&g, &parse_spec("pos = pron").unwrap());
    let redenoted = denote(&parse_spec(&target[0].cover).unwrap(), &g).unwrap();
    check(redenoted == pron, || {
        format!("(b) cover {}", target[0].cover)
    })?;

    let rs = rules(
        &g,
        &with_rule(UPENN_RULES, "VPART", "[pos = 'VPART'] => [vform = part]."),
    );
    let hier = check_hierarchical(&build_mtree(&rs, &g));
    check(hier.len() == 1, || format!("(c) {hier:?}"))?;

    let rs = rules(
        &g,
        &with_rule(UPENN_RULES, "NNX", "[pos = 'NNX'] => [n & mass]."),
    );
    let overlap = check_nondisjointness(&rs, &g);
    check(
        overlap.len() == 1 && overlap[0].cover == "ntype=mass",
        || format!("(d) {overlap:?}"),
    )?;
    Ok(format!("hierarchical: {}", hier[0].message))
}

fn retagging() -> Outcome {
    let g = graph();
    let rs = rules(&g, UPENN_RULES);
    let mut out = Vec::new();
    let summary = retag_stream(
        "anybody/NN house/NN\n".as_bytes(),
        &rs,
        CorpusFormat::Slash,
        &mut out,
    )
    .unwrap();
    let out = String::from_utf8(out).unwrap();
    let lines: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    let into = rs
        .exceptions
        .iter()
        .find(|e| e.words.iter().any(|w| w == "anybody"))
        .unwrap();
    check(lines.len() == 2, || out.clone())?;
    check(
        lines[0][2] == into.into.render() && lines[0][3] == "exception",
        || out.clone(),
    )?;
    check(
        lines[1][2] == "[n & (common & sg | mass)]"
            && lines[1][3] == "coverage"
            && lines[1][4] == "underspecified",
        || out.clone(),
    )?;
    check(
        summary.exceptions == 1 && summary.underspecified == 1,
        || format!("{summary:?}"),
    )?;
    Ok(format!("anybody -> {}", lines[0][2]))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let g = graph();
    let rs = rules(&g, UPENN_RULES);
    let mt = build_mtree(&rs, &g);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a6d);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 1000 {
        attempts += 1;
        if attempts > 200_000 {
            return Err(format!("only {checked} well-typed specs generated"));
        }
        let e = random_spec(&mut rng, &g, 4);
        let Ok(q) = typecheck(&e, &g) else { continue };
        let text = e.bracketed();
        let want = brute_denote(&g, &e);
        check(q.denotation == want, || format!("denotation of {text}"))?;

        let dnf = to_dnf(&resolve_names(&e, &g).unwrap());
        check(dnf.denote(&g) == want, || format!("DNF of {text}"))?;

        let r = resolve(&q, &mt, &rs);
        let hit = |target: &tagmap::SpecExpr| {
            g.terminal_classes()
                .iter()
                .any(|c| holds(&g, target, c) && holds(&g, &e, c))
        };
        let mut tags = Vec::new();
        let mut noise = BTreeMap::new();
        for tag in &rs.inventory {
            let rule = &rs.coverage[tag];
            let base = hit(&rule.target.expr);
            let injected = rs.exceptions_for(tag).any(|x| hit(&x.into.expr));
            if base || injected {
                tags.push(tag.as_str());
            }
            if base {
                let extra = ClassSet::from_indices(
                    g.universe_len(),
                    g.terminal_classes()
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| holds(&g, &rule.target.expr, c) && !holds(&g, &e, c))
                        .map(|(i, _)| i),
                );
                if !extra.is_empty() {
                    noise.insert(tag.as_str(), extra);
                }
            }
        }
        let got: Vec<&str> = r.patterns.iter().map(|p| p.tag.as_str()).collect();
        check(got == tags, || {
            format!("tags of {text}: {got:?} vs {tags:?}")
        })?;
        let got_noise: BTreeMap<&str, ClassSet> = r
            .noise
            .tags
            .iter()
            .map(|n| (n.tag.as_str(), n.classes.clone()))
            .collect();
        check(got_noise == noise, || format!("noise of {text}"))?;
        for n in &r.noise.tags {
            let back = denote(&parse_spec(n.cover.text()).unwrap(), &g).unwrap();
            check(back == n.classes, || {
                format!("noise cover `{}` of {text}", n.cover)
            })?;
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{checked} specs of {attempts} generated ({} ms)",
        elapsed.as_millis()
    ))
}

fn closed_world() -> Outcome {
    let g = graph();
    let u = g.terminal_classes();
    let mut laws = 0;
    for (f, decl) in g.features().iter().enumerate() {
        let domain =
            ClassSet::from_indices(u.len(), (0..u.len()).filter(|&i| u[i].values[f].is_some()));
        for v in &decl.values {
            let eq = denote(&parse_spec(&format!("{} = {v}", decl.name)).unwrap(), &g)
                .map_err(|e| e.to_string())?;
            let ne = denote(&parse_spec(&format!("{} != {v}", decl.name)).unwrap(), &g)
                .map_err(|e| e.to_string())?;
            check(!eq.intersects(&ne), || {
                format!("{}={v} overlaps its negation", decl.name)
            })?;
            check(&eq | &ne == domain, || {
                format!("{}={v} misses part of its domain", decl.name)
            })?;
            laws += 1;
        }
    }
    for n in 0..g.nodes().len() {
        let name = &g.node(NodeId(n)).name;
        let eq = denote(&parse_spec(&format!("pos = {name}")).unwrap(), &g).unwrap();
        let ne = denote(&parse_spec(&format!("pos != {name}")).unwrap(), &g).unwrap();
        check(!eq.intersects(&ne) && &eq | &ne == g.universe(), || {
            format!("pos={name}")
        })?;
        laws += 1;
    }
    Ok(format!("{laws} laws"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tagset = dir.join("eagles-en.tagset");
    let rules = dir.join("upenn.rules");
    let mut full = vec!["tagmap".to_string(), args[0].to_string()];
    full.extend([
        "--tagset".into(),
        tagset.display().to_string(),
        "--rules".into(),
        rules.display().to_string(),
    ]);
    full.extend(args[1..].iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let status = cli::run(
        full,
        &mut Cursor::new(Vec::new()),
        &mut out,
        &mut Vec::new(),
    );
    (status, out)
}

fn determinism() -> Outcome {
    let once = || {
        let mut all = Vec::new();
        for args in [&["compile"][..], &["explain"], &["query", QUERY]] {
            let (status, out) = run_cli(args);
            if status != 0 {
                return Err(format!("{} exited with {status}", args[0]));
            }
            all.extend(out);
        }
        Ok(all)
    };
    let a = once()?;
    let b = once()?;
    check(a == b, || "outputs differ between runs".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("query translation", query_translation),
        ("type errors", type_errors),
        ("mapping diagnostics", mapping_diagnostics),
        ("retagging", retagging),
        ("oracle equivalence", oracle_equivalence),
        ("closed-world laws", closed_world),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

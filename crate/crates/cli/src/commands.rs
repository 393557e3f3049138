//! The three subcommands. Every text output starts with `# key: value`
//! provenance lines; `manifest.json` in the output directory records the
//! full invocation and the hash of every input and output.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use betlearn::belief::expected_ability;
use betlearn::panel::{read_panel_csv, write_panel_csv};
use betlearn::simulator::{run_scenario, simulate_panel, AgentTruth, ScenarioConfig};
use betlearn::txlog::{
    aggregate_panel, read_bets_log, read_ledger_csv, write_bets_log, write_ledger_csv, Calendar, CompanyTable,
    ParseSummary,
};

use crate::manifest::{
    comment_lines, file_sha256, origin_of, read_header_comments, sha256_hex, HashingWriter, RunManifest,
};
use crate::tables::{build, figure1_points_csv, TableOptions};
use crate::{CliError, ParseArgs, SimulateArgs, TablesArgs};

fn create(path: &Path) -> Result<HashingWriter<BufWriter<File>>, CliError> {
    let f = File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(HashingWriter::new(BufWriter::new(f)))
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_comments<W: Write>(w: &mut W, lines: &[String]) -> std::io::Result<()> {
    for l in lines {
        writeln!(w, "# {l}")?;
    }
    Ok(())
}

fn write_agents<W: Write>(mut w: W, agents: &[AgentTruth], header: &[String]) -> std::io::Result<()> {
    write_comments(&mut w, header)?;
    writeln!(w, "individual_id,agent_type,type_name,ability,prior_successes,prior_failures,final_expected_ability")?;
    for a in agents {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            a.individual_id,
            a.agent_type,
            a.type_name,
            a.ability,
            a.prior.prior_successes,
            a.prior.prior_failures,
            expected_ability(&a.final_belief).map_or(String::new(), |e| e.to_string())
        )?;
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs, argv: &[String]) -> Result<(), CliError> {
    let bytes = fs::read(&a.config).map_err(|e| CliError::Data(format!("{}: {e}", a.config.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Data(format!("{}: not UTF-8", a.config.display())))?;
    let mut config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("config {}: {e}", a.config.display())))?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    config.validate()?;
    let config_sha = sha256_hex(&bytes);
    fs::create_dir_all(&a.out)?;

    let out = if a.panel_only {
        simulate_panel(&config)?
    } else {
        run_scenario(&config)?
    };
    let origin = vec![
        ("seed".to_string(), config.seed.to_string()),
        ("config_sha256".to_string(), config_sha.clone()),
    ];
    let header = comment_lines(&origin);
    let mut manifest = RunManifest::new("simulate", argv, &a.out);
    manifest.config = Some(a.config.display().to_string());
    manifest.seed = Some(config.seed);
    manifest.config_sha256 = Some(config_sha.clone());
    manifest.inputs.insert(a.config.display().to_string(), config_sha);

    let mut w = create(&a.out.join("panel.csv"))?;
    write_panel_csv(&mut w, &out.panel, &header)?;
    manifest.outputs.insert("panel.csv".into(), w.finish()?);

    let mut w = create(&a.out.join("agents.csv"))?;
    write_agents(&mut w, &out.agents, &header)?;
    manifest.outputs.insert("agents.csv".into(), w.finish()?);

    let mut w = create(&a.out.join("calendar.json"))?;
    serde_json::to_writer_pretty(&mut w, &out.calendar).map_err(std::io::Error::other)?;
    writeln!(w)?;
    manifest.outputs.insert("calendar.json".into(), w.finish()?);

    if let Some(tx) = &out.transactions {
        let mut w = create(&a.out.join("bets.log"))?;
        write_comments(&mut w, &header)?;
        write_bets_log(&mut w, &tx.bets)?;
        manifest.outputs.insert("bets.log".into(), w.finish()?);

        let mut w = create(&a.out.join("ledger.csv"))?;
        write_comments(&mut w, &header)?;
        write_ledger_csv(&mut w, &tx.ledger)?;
        manifest.outputs.insert("ledger.csv".into(), w.finish()?);
    }
    manifest.write(&a.out)?;
    eprintln!(
        "simulated {} individuals x {} weeks (seed {}) into {}",
        config.population,
        config.weeks,
        config.seed,
        a.out.display()
    );
    Ok(())
}

pub fn parse(a: &ParseArgs, argv: &[String]) -> Result<ParseSummary, CliError> {
    let calendar = Calendar::load(&a.calendar)?;
    let table = match &a.companies {
        Some(p) => CompanyTable::load(p)?,
        None => CompanyTable::default(),
    };
    let (bets, summary) = read_bets_log(BufReader::new(open(&a.bets)?))?;
    let ledger = read_ledger_csv(BufReader::new(open(&a.ledger)?))?;
    let panel = aggregate_panel(&ledger, &bets, &table, &calendar)?;

    // keep the simulation's provenance so parsed and direct panels match
    let mut origin = origin_of(&read_header_comments(&a.ledger)?);
    if origin.is_empty() {
        origin = origin_of(&read_header_comments(&a.bets)?);
    }
    fs::create_dir_all(&a.out)?;
    let mut manifest = RunManifest::new("parse", argv, &a.out);
    for p in [Some(&a.bets), Some(&a.ledger), Some(&a.calendar), a.companies.as_ref()].into_iter().flatten() {
        manifest.inputs.insert(p.display().to_string(), file_sha256(p)?);
    }
    let mut w = create(&a.out.join("panel.csv"))?;
    write_panel_csv(&mut w, &panel, &comment_lines(&origin))?;
    manifest.outputs.insert("panel.csv".into(), w.finish()?);
    manifest.write(&a.out)?;

    eprintln!("parsed {} bet lines, skipped {}", summary.parsed, summary.skipped());
    for (kind, n) in &summary.errors {
        eprintln!("  {kind}: {n}");
    }
    eprintln!("wrote {} individual-weeks to {}", panel.len(), a.out.join("panel.csv").display());
    Ok(summary)
}

pub fn tables(a: &TablesArgs, argv: &[String]) -> Result<(), CliError> {
    if !(a.cutoff.is_finite() && a.cutoff >= 0.0) {
        return Err(CliError::Usage(format!("--cutoff must be a non-negative number, got {}", a.cutoff)));
    }
    let origin = origin_of(&read_header_comments(&a.panel).map_err(|e| CliError::Data(format!("{}: {e}", a.panel.display())))?);
    let panel_sha = file_sha256(&a.panel)?;
    let panel = read_panel_csv(BufReader::new(open(&a.panel)?))?;
    let options = TableOptions {
        cutoff: a.cutoff,
        mode: a.mode.into(),
        covariance: a.covariance.into(),
        min_matches: a.min_matches,
    };
    fs::create_dir_all(&a.out)?;
    let mut manifest = RunManifest::new("tables", argv, &a.out);
    manifest.inputs.insert(a.panel.display().to_string(), panel_sha.clone());

    for kind in a.selected() {
        let built = build(kind, &panel, &options)?;
        let mut pairs = vec![
            ("command".to_string(), "tables".to_string()),
            ("table".to_string(), kind.name().to_string()),
            ("panel_sha256".to_string(), panel_sha.clone()),
        ];
        pairs.extend(origin.iter().cloned());
        pairs.extend(options.describe(kind));
        let header = comment_lines(&pairs);
        let text = built.table.render_text(&header);
        let mut files = vec![
            (format!("{}.txt", built.table.id), text.clone()),
            (format!("{}.csv", built.table.id), built.table.render_csv(&header)),
        ];
        if let Some(points) = &built.points {
            files.push((format!("{}_points.csv", built.table.id), figure1_points_csv(points, &header)));
        }
        for (name, body) in files {
            fs::write(a.out.join(&name), &body)?;
            manifest.outputs.insert(name, sha256_hex(body.as_bytes()));
        }
        println!("{text}");
    }
    manifest.write(&a.out)?;
    Ok(())
}

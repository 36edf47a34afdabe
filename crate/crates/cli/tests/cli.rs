use std::fs;
use std::path::{Path, PathBuf};

use enetsearch::synth::{gaussian_regression, BinaryCodes};
use enetsearch::{preferable, search, z_surface, Dataset, Family, SearchConfig};
use enetsearch_cli::plot::ContourLayout;
use enetsearch_cli::{load_csv, read_summary_csv, run, PreferableModel};

fn write_csv(path: &Path, data: &Dataset, response: &str) {
    let mut w = csv::Writer::from_path(path).unwrap();
    let mut header: Vec<&str> = data.column_names().iter().map(String::as_str).collect();
    header.push(response);
    w.write_record(&header).unwrap();
    for i in 0..data.n() {
        let mut row: Vec<String> = data.x().row(i).iter().map(|v| v.to_string()).collect();
        row.push(data.y()[i].to_string());
        w.write_record(&row).unwrap();
    }
    w.flush().unwrap();
}

struct Fixture {
    dir: tempfile::TempDir,
    csv: PathBuf,
}

impl Fixture {
    fn binary(n: usize, seed: u64) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("tbi.csv");
        let data = BinaryCodes::injury_like().generate(n, seed).unwrap().data;
        write_csv(&csv, &data, "outcome");
        Fixture { dir, csv }
    }

    fn gaussian() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("g.csv");
        let data = gaussian_regression(80, 6, 3, 0.2, 1.0, 4).unwrap().data;
        write_csv(&csv, &data, "y");
        Fixture { dir, csv }
    }

    fn raw(body: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("raw.csv");
        fs::write(&csv, body).unwrap();
        Fixture { dir, csv }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, out: &str, extra: &[&str]) -> i32 {
        let out = self.out(out);
        let mut argv = vec![
            "enetsearch".to_string(),
            "--data".into(),
            self.csv.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ];
        argv.extend(extra.iter().map(|s| s.to_string()));
        run(argv)
    }
}

const BINOMIAL: &[&str] = &["--response", "outcome", "--family", "binomial", "--folds", "5", "--nlambda", "30"];
const GAUSSIAN: &[&str] = &["--response", "y", "--folds", "5", "--nlambda", "25"];

fn parse_svg(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text
}

#[test]
fn end_to_end_on_binary_codes() {
    let fx = Fixture::binary(300, 11);
    assert_eq!(fx.run("out", BINOMIAL), 0);
    let out = fx.out("out");
    let summary: Vec<enetsearch::CvRecord> =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.len(), 10 * 30);
    let model: PreferableModel =
        serde_json::from_str(&fs::read_to_string(out.join("preferable.json")).unwrap()).unwrap();
    assert_eq!(model.family, Family::Binomial);
    assert_eq!(model.coefficients.len(), 12);
    assert_eq!(model.coefficients[0].name, "pcode1");
    assert_eq!(model.coefficients.iter().filter(|c| c.value != 0.0).count(), model.nzero);
    parse_svg(&out.join("contour.svg"));
    parse_svg(&out.join("nzero.svg"));
    assert!(!out.join("sensitivity.json").exists());
}

#[test]
fn svg_documents_have_expected_structure() {
    let fx = Fixture::gaussian();
    assert_eq!(fx.run("out", GAUSSIAN), 0);
    let text = parse_svg(&fx.out("out").join("contour.svg"));
    let doc = roxmltree::Document::parse(&text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    let cells = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("cells"))
        .unwrap();
    assert_eq!(cells.children().filter(|n| n.has_tag_name("rect")).count(), 10 * 25);
    let legend = doc.descendants().find(|n| n.attribute("id") == Some("legend")).unwrap();
    assert_eq!(legend.children().filter(|n| n.has_tag_name("rect")).count(), 10);
    let ticks = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("tick-labels"))
        .unwrap();
    assert!(ticks
        .children()
        .filter(|n| n.has_tag_name("text"))
        .all(|n| n.text().unwrap().parse::<f64>().is_ok()));

    let text = parse_svg(&fx.out("out").join("nzero.svg"));
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert!(doc.descendants().any(|n| n.attribute("id") == Some("envelope")));
}

#[test]
fn single_cell_contour_is_valid() {
    let fx = Fixture::gaussian();
    assert_eq!(fx.run("out", &["--response", "y", "--folds", "3", "--alphas", "0.5", "--nlambda", "1"]), 0);
    let text = parse_svg(&fx.out("out").join("contour.svg"));
    let doc = roxmltree::Document::parse(&text).unwrap();
    let cells = doc.descendants().find(|n| n.attribute("id") == Some("cells")).unwrap();
    assert_eq!(cells.children().filter(|n| n.has_tag_name("rect")).count(), 1);
    parse_svg(&fx.out("out").join("nzero.svg"));
}

#[test]
fn minimum_marker_sits_on_preferable_point() {
    let fx = Fixture::gaussian();
    assert_eq!(fx.run("out", GAUSSIAN), 0);
    let model: PreferableModel =
        serde_json::from_str(&fs::read_to_string(fx.out("out").join("preferable.json")).unwrap()).unwrap();

    let data = load_csv(&fx.csv, "y", Family::Gaussian).unwrap();
    let config = SearchConfig {
        nlambda: 25,
        k_folds: 5,
        ..SearchConfig::default()
    };
    let result = search(&data, &config).unwrap();
    let (best, _) = preferable(&result);
    assert_eq!((best.alpha, best.lambda), (model.alpha, model.lambda));
    let (px, py) = ContourLayout::new(&z_surface(&result)).position(model.alpha, model.lambda);

    let text = parse_svg(&fx.out("out").join("contour.svg"));
    let doc = roxmltree::Document::parse(&text).unwrap();
    let marker = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("global-minimum"))
        .unwrap();
    assert_eq!(marker.attribute("fill"), Some("#ff0000"));
    let cx: f64 = marker.attribute("cx").unwrap().parse().unwrap();
    let cy: f64 = marker.attribute("cy").unwrap().parse().unwrap();
    assert!((cx - px).abs() <= 5e-4 && (cy - py).abs() <= 5e-4, "({cx}, {cy}) vs ({px}, {py})");
}

#[test]
fn summary_csv_round_trips_exactly() {
    let fx = Fixture::binary(200, 3);
    let mut args = BINOMIAL.to_vec();
    args.extend(["--format", "csv", "--seed", "9"]);
    assert_eq!(fx.run("out", &args), 0);
    let loaded = read_summary_csv(&fx.out("out").join("summary.csv")).unwrap();

    let data = load_csv(&fx.csv, "outcome", Family::Binomial).unwrap();
    let config = SearchConfig {
        nlambda: 30,
        k_folds: 5,
        seed: 9,
        ..SearchConfig::default()
    };
    let result = search(&data, &config).unwrap();
    assert_eq!(loaded, result.summary);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let fx = Fixture::binary(200, 5);
    let mut args = BINOMIAL.to_vec();
    args.extend(["--format", "csv", "--sensitivity", "3"]);
    assert_eq!(fx.run("a", &args), 0);
    args.extend(["--threads", "1"]);
    assert_eq!(fx.run("b", &args), 0);
    for name in ["summary.csv", "preferable.json", "contour.svg", "nzero.svg", "sensitivity.csv"] {
        let a = fs::read(fx.out("a").join(name)).unwrap();
        let b = fs::read(fx.out("b").join(name)).unwrap();
        assert!(a == b, "{name} differs between runs");
    }
}

#[test]
fn sensitivity_csv_ends_with_frequency_row() {
    let fx = Fixture::gaussian();
    let mut args = GAUSSIAN.to_vec();
    args.extend(["--format", "csv", "--sensitivity", "2"]);
    assert_eq!(fx.run("out", &args), 0);
    let mut r = csv::Reader::from_path(fx.out("out").join("sensitivity.csv")).unwrap();
    let header = r.headers().unwrap().clone();
    assert_eq!(header.len(), 7 + 6 + 1);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[2][0], "frequency");
    for v in rows[2].iter().skip(7).take(6) {
        let f: f64 = v.parse().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn usage_errors_exit_2() {
    let fx = Fixture::gaussian();
    assert_eq!(fx.run("out", &["--response", "y", "--bogus"]), 2);
    assert_eq!(run(["enetsearch", "--response", "y"]), 2);
    assert_eq!(fx.run("out", &["--response", "y", "--family", "poisson"]), 2);
    assert_eq!(fx.run("out", &["--response", "y", "--alphas", "0.1:0.9"]), 2);
    assert_eq!(fx.run("out", &["--response", "y", "--alphas", "0.2,1.5"]), 2);
    assert_eq!(fx.run("out", &["--response", "y", "--folds", "1"]), 2);
    assert_eq!(fx.run("out", &["--response", "y", "--sensitivity", "1"]), 2);
    assert_eq!(fx.run("out", &["--response", "y", "--threads", "0"]), 2);
    assert!(!fx.out("out").join("summary.json").exists());
}

#[test]
fn data_errors_exit_3() {
    let na = Fixture::raw("a,b,y\n1,2,0.5\n3,NA,1.5\n4,5,2\n");
    assert_eq!(na.run("out", &["--response", "y"]), 3);

    let empty = Fixture::raw("a,y\n");
    assert_eq!(empty.run("out", &["--response", "y"]), 3);

    let fx = Fixture::gaussian();
    assert_eq!(fx.run("out", &["--response", "nope"]), 3);
    assert_eq!(fx.run("out", &["--response", "y", "--family", "binomial"]), 3);

    let missing = Fixture::raw("");
    fs::remove_file(&missing.csv).unwrap();
    assert_eq!(missing.run("out", &["--response", "y"]), 3);

    let flat = Fixture::raw("a,y\n1,2\n2,2\n3,2\n4,2\n5,2\n6,2\n");
    assert_eq!(flat.run("out", &["--response", "y", "--folds", "3"]), 3);
}

#[test]
fn unwritable_output_exits_4() {
    let fx = Fixture::gaussian();
    let blocker = fx.out("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(fx.run("file/sub", GAUSSIAN), 4);
}

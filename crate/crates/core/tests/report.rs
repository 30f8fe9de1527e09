use attrib_core::portfolio_file::StandaloneLine;
use attrib_core::report::{build_report, render_report, to_bps, ReportFormat};
use attrib_core::{AttributionResult, Bucket, PositionAttribution};
use proptest::prelude::*;

fn position(id: String, bucket: Bucket, parts: [f64; 4], costs: f64) -> PositionAttribution {
    let [fx, rate, market, carry] = parts;
    PositionAttribution {
        id,
        bucket,
        subperiods: vec![],
        aggregate: AttributionResult::new(fx, rate, market, carry, fx + rate + market + carry),
        costs,
    }
}

fn positions() -> impl Strategy<Value = Vec<PositionAttribution>> {
    prop::collection::vec(
        (
            prop::sample::select(Bucket::ALL.to_vec()),
            prop::array::uniform4(-5e5f64..5e5),
            0.0f64..1e4,
        ),
        1..25,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (b, parts, c))| position(format!("P{i:02}"), b, parts, c))
            .collect()
    })
}

fn lines() -> impl Strategy<Value = Vec<StandaloneLine>> {
    prop::collection::vec(-1e5f64..1e5, 0..4).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, amount_eur)| StandaloneLine { label: format!("LINE {i}"), amount_eur })
            .collect()
    })
}

struct Parsed {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Parsed {
    fn new(bytes: &[u8]) -> Self {
        let mut r = csv::Reader::from_reader(bytes);
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
        Self { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap()
    }

    fn num(row: &[String], i: usize) -> f64 {
        row[i].parse().unwrap()
    }
}

const EUR_COLS: [&str; 7] = ["fx_eur", "rate_eur", "market_eur", "carry_eur", "costs_eur", "total_eur", "hedged_eur"];

proptest! {
    #[test]
    fn printed_totals_add_up(results in positions(), extra in lines(), nav in prop::option::of(1e6f64..1e9)) {
        let bytes = render_report(&results, &extra, ReportFormat::Csv, nav).unwrap();
        let p = Parsed::new(&bytes);
        let is_position = |r: &Vec<String>| r[0].starts_with('P') && r[0] != "POSITIONS";
        let members: Vec<_> = p.rows.iter().filter(|r| is_position(r)).collect();
        prop_assert_eq!(members.len(), results.len());
        // Each printed value is off by at most 0.5 EUR.
        let slack = |k: usize| 0.5 * (k as f64 + 1.0) + 1e-6;

        for col in EUR_COLS {
            let i = p.col(col);
            let mut invest_subtotals = 0.0;
            let mut n_invest = 0;
            for sub in p.rows.iter().filter(|r| r[0] == "SUBTOTAL") {
                let rows: Vec<_> = members.iter().filter(|r| r[1] == sub[1]).collect();
                let sum: f64 = rows.iter().map(|r| Parsed::num(r, i)).sum();
                prop_assert!((Parsed::num(sub, i) - sum).abs() <= slack(rows.len()), "{col} {}", sub[1]);
                if sub[1].parse::<Bucket>().unwrap().is_investment() {
                    invest_subtotals += Parsed::num(sub, i);
                    n_invest += 1;
                }
            }
            let positions = p.rows.iter().find(|r| r[0] == "POSITIONS").unwrap();
            prop_assert!((Parsed::num(positions, i) - invest_subtotals).abs() <= slack(n_invest));
            if col != "hedged_eur" {
                let total = p.rows.last().unwrap();
                let sum: f64 = members.iter().map(|r| Parsed::num(r, i)).sum();
                prop_assert!((Parsed::num(total, i) - sum).abs() <= slack(members.len()));
            }
        }

        let h = p.col("hedged_eur");
        let positions = p.rows.iter().find(|r| r[0] == "POSITIONS").unwrap();
        let line_rows: Vec<_> = p.rows.iter().skip_while(|r| r[0] != "POSITIONS").skip(1).take_while(|r| r[0] != "TOTAL").collect();
        prop_assert_eq!(line_rows.len(), 3 + extra.len());
        let total = p.rows.last().unwrap();
        let sum = Parsed::num(positions, h) + line_rows.iter().map(|r| Parsed::num(r, h)).sum::<f64>();
        prop_assert!((Parsed::num(total, h) - sum).abs() <= slack(line_rows.len() + 1));

        for r in &members {
            let v = |c| Parsed::num(r, p.col(c));
            prop_assert!((v("hedged_eur") - (v("market_eur") + v("carry_eur") - v("costs_eur"))).abs() <= 1.5 + 1e-6);
        }

        match nav {
            Some(nav) => {
                prop_assert_eq!(p.header.len(), 16);
                for r in &p.rows {
                    for col in EUR_COLS {
                        let (e, b) = (p.col(col), p.col(&col.replace("_eur", "_bps")));
                        if r[e].is_empty() {
                            prop_assert!(r[b].is_empty());
                            continue;
                        }
                        let implied = Parsed::num(r, e) / nav * 1e4;
                        prop_assert!((Parsed::num(r, b) - implied).abs() <= 0.05 + 0.5 / nav * 1e4 + 1e-9);
                    }
                }
            }
            None => prop_assert!(p.header.iter().all(|h| !h.ends_with("_bps"))),
        }
    }

    #[test]
    fn rendering_is_byte_stable(results in positions(), extra in lines(), nav in prop::option::of(1e6f64..1e9)) {
        for format in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Text] {
            let a = render_report(&results, &extra, format, nav).unwrap();
            prop_assert_eq!(&a, &render_report(&results, &extra, format, nav).unwrap());
        }
    }

    #[test]
    fn report_total_is_fund_pnl_net_of_costs(results in positions(), extra in lines()) {
        let report = build_report(&results, &extra, None).unwrap();
        let fund: f64 = results.iter().map(|r| r.aggregate.total - r.costs).sum();
        let pass: f64 = extra.iter().map(|l| l.amount_eur).sum();
        prop_assert!((report.total_line() - (fund + pass)).abs() <= 1e-6 * (fund.abs() + pass.abs()).max(1.0));
    }
}

#[test]
fn bps_round_half_to_even() {
    assert_eq!(to_bps(0.25, 1e4), 0.2);
    assert_eq!(to_bps(0.75, 1e4), 0.8);
    assert_eq!(to_bps(-0.25, 1e4), -0.2);
    assert_eq!(to_bps(1_234_567.0, 1e8), 123.5);
}

#[test]
fn json_mirrors_csv_field_names() {
    let results = vec![
        position("A".into(), Bucket::MatchedBasis, [1.0, 2.0, 3.0, 4.0], 0.5),
        position("B".into(), Bucket::Hedge, [-1.0, -2.0, 0.0, 0.0], 0.0),
    ];
    let json = render_report(&results, &[], ReportFormat::Json, Some(1e6)).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    let row = &v["buckets"][0]["positions"][0];
    for col in EUR_COLS {
        assert!(row.get(col).is_some(), "{col}");
        assert!(row.get(col.replace("_eur", "_bps")).is_some(), "{col}");
    }
    assert_eq!(row["position"], "A");
    assert_eq!(v["buckets"][0]["top"], "A");

    let json = render_report(&results, &[], ReportFormat::Json, None).unwrap();
    assert!(!String::from_utf8(json).unwrap().contains("_bps"));
}

#[test]
fn empty_results_and_bad_nav_are_errors() {
    assert!(build_report(&[], &[], None).is_err());
    let r = vec![position("A".into(), Bucket::Other, [0.0; 4], 0.0)];
    assert!(build_report(&r, &[], Some(0.0)).is_err());
    assert!(build_report(&r, &[], Some(f64::NAN)).is_err());
}

use bauv_core::simcore::{run_trial, SimConfig, TrialLog};
use bauv_sim::output::{
    format_table, sig9, write_metrics, write_trajectory, write_waypoints, MetricsRow,
};
use bauv_sim::plot::{render_svg, Trace};
use proptest::prelude::*;

fn short_trial(t_max: f64, amplitude: f64) -> TrialLog {
    let mut cfg = SimConfig {
        t_max,
        ..SimConfig::default()
    };
    cfg.path.amplitude = amplitude;
    run_trial(&cfg).unwrap().log
}

fn text<F: FnOnce(&mut Vec<u8>)>(f: F) -> String {
    let mut buf = Vec::new();
    f(&mut buf);
    String::from_utf8(buf).unwrap()
}

#[test]
fn trajectory_csv_schema() {
    let log = short_trial(1.0, 0.5);
    let out = text(|b| write_trajectory(&log, b).unwrap());
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x,y,psi,u,v,r,chi_d,y_e,beta_hat,segment,th1,th2,th3,th4,th5,th6,th7,tau_x,tau_y,tau_n"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), log.rows.len());
    for (line, row) in rows.iter().zip(&log.rows) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 21);
        assert_eq!(cells[10].parse::<usize>().unwrap(), row.segment);
        let want = [
            row.t,
            row.x,
            row.y,
            row.psi,
            row.u,
            row.v,
            row.r,
            row.chi_d,
            row.y_e,
            row.beta_hat,
        ];
        for (c, w) in cells.iter().zip(want) {
            let v: f64 = c.parse().unwrap();
            assert!((v - w).abs() <= 5e-9 * w.abs(), "{c} vs {w}");
        }
        for (c, w) in cells[11..18].iter().zip(row.theta) {
            let v: f64 = c.parse().unwrap();
            assert!((v - w).abs() <= 5e-9 * w.abs());
        }
    }
}

#[test]
fn waypoint_csv_is_exact() {
    let pts = bauv_core::pathgen::SinusoidSpec::default()
        .points()
        .unwrap();
    let out = text(|b| write_waypoints(&pts, b).unwrap());
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,x_m,y_m");
    assert_eq!(lines.len(), 62);
    for (i, (line, p)) in lines[1..].iter().zip(&pts).enumerate() {
        let c: Vec<&str> = line.split(',').collect();
        assert_eq!(c[0].parse::<usize>().unwrap(), i);
        assert_eq!(c[1].parse::<f64>().unwrap(), p[0]);
        assert_eq!(c[2].parse::<f64>().unwrap(), p[1]);
    }
}

fn metrics_row(rmse: Option<f64>, wall: Option<f64>) -> MetricsRow {
    MetricsRow {
        guidance_mode: "adaptive".into(),
        amplitude_mode: "controlled".into(),
        delta_multiple: 1.75,
        rmse,
        mae: rmse.map(|r| r * 0.8),
        completed: rmse.is_some(),
        sim_seconds: 57.9,
        wall_seconds: wall,
        error: rmse.is_none().then(|| "aborted".to_string()),
    }
}

#[test]
fn metrics_csv_columns() {
    let rows = [
        metrics_row(Some(0.0669), None),
        metrics_row(None, Some(0.25)),
    ];
    let out = text(|b| write_metrics(&rows, b).unwrap());
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "guidance_mode,amplitude_mode,delta_multiple,rmse_m,mae_m,completed,sim_seconds,wall_seconds"
    );
    assert_eq!(
        lines[1],
        "adaptive,controlled,1.75,0.0669,0.05352,true,57.9,"
    );
    assert_eq!(lines[2], "adaptive,controlled,1.75,,,false,57.9,0.25");
}

#[test]
fn table_is_aligned() {
    let rows = [metrics_row(Some(0.0669), None), metrics_row(None, None)];
    let t = format_table(&rows);
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("guidance"));
    assert!(lines[2].contains("0.0669") && lines[2].contains("yes"));
    assert!(lines[3].contains("abort"));
    let col = lines[0].find("rmse_m").unwrap() + "rmse_m".len();
    assert_eq!(lines[2].find("0.0669").unwrap() + 6, col);
    assert_eq!(lines[3].find('-').unwrap() + 1, col);
}

/// Parses every `points` attribute of every polyline.
fn polylines(svg: &str) -> Vec<Vec<[f64; 2]>> {
    svg.split("<polyline")
        .skip(1)
        .map(|el| {
            let start = el.find("points=\"").unwrap() + 8;
            let end = start + el[start..].find('"').unwrap();
            el[start..end]
                .split_whitespace()
                .map(|pair| {
                    let (x, y) = pair.split_once(',').unwrap();
                    [x.parse().unwrap(), y.parse().unwrap()]
                })
                .collect()
        })
        .collect()
}

#[test]
fn plot_without_traces_has_only_the_reference() {
    let pts = bauv_core::pathgen::SinusoidSpec::default()
        .points()
        .unwrap();
    let svg = render_svg("ref", &pts, &[]);
    let lines = polylines(&svg);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0], pts);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn straight_trace_points_equal_the_log() {
    let log = short_trial(5.0, 0.0);
    let pts = bauv_core::pathgen::SinusoidSpec {
        amplitude: 0.0,
        ..Default::default()
    }
    .points()
    .unwrap();
    let trace = Trace {
        label: "adaptive".into(),
        log: &log,
    };
    let lines = polylines(&render_svg("straight", &pts, &[trace]));
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].len(), log.rows.len());
    for (p, r) in lines[1].iter().zip(&log.rows) {
        assert_eq!(*p, [r.x, r.y]);
    }
}

#[test]
fn four_mode_overlay_has_five_polylines_and_a_legend() {
    let log = short_trial(1.0, 0.5);
    let labels = [
        "LOS & max",
        "LOS <controlled>",
        "ALOS max",
        "ALOS controlled",
    ];
    let traces: Vec<Trace> = labels
        .iter()
        .map(|l| Trace {
            label: l.to_string(),
            log: &log,
        })
        .collect();
    let pts = bauv_core::pathgen::SinusoidSpec::default()
        .points()
        .unwrap();
    let svg = render_svg("overlay", &pts, &traces);
    assert_eq!(polylines(&svg).len(), 5);
    assert!(svg.contains("LOS &amp; max") && svg.contains("LOS &lt;controlled&gt;"));
    assert!(svg.contains("reference path"));
    assert!(svg.contains("x [m]") && svg.contains("y [m]"));
}

#[test]
fn plot_uses_one_scale_for_both_axes() {
    let pts = bauv_core::pathgen::SinusoidSpec::default()
        .points()
        .unwrap();
    let svg = render_svg("aspect", &pts, &[]);
    let start = svg.find("matrix(").unwrap() + 7;
    let end = start + svg[start..].find(')').unwrap();
    let m: Vec<f64> = svg[start..end]
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(m[0], -m[3]);
    assert!(m[0] > 0.0);
    assert_eq!((m[1], m[2]), (0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sig9_keeps_nine_digits(x in prop_oneof![-1e12f64..1e12, -1e-3f64..1e-3, -1e-8f64..1e-8]) {
        let s = sig9(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-9 * x.abs(), "{x} -> {s}");
        let digits = s
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(char::is_ascii_digit)
            .collect::<String>();
        prop_assert!(digits.trim_start_matches('0').len() <= 9, "{s}");
    }
}

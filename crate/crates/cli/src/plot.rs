//! gnuplot scripts for the boundary curve and the three-user region.
//! Scripts only reference the CSV files; rendering is left to the user.

use std::fmt::Write;
use std::path::Path;

/// `eps2` against `eps1` along the boundary with the single-user minima.
pub fn boundary_script(csv: &Path, eps_min1: f64, eps_min2: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# set terminal pngcairo size 640,640; set output 'boundary.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'eps_1'");
    let _ = writeln!(s, "set ylabel 'eps_2'");
    let _ = writeln!(s, "set xrange [0:1.05]");
    let _ = writeln!(s, "set yrange [0:1.05]");
    let _ = writeln!(s, "set size square");
    let _ = writeln!(s, "set key bottom left");
    let _ = writeln!(
        s,
        "plot '{}' skip 1 using 2:3 with lines lw 2 title 'eps_2 = g(eps_1)', \\",
        csv.display()
    );
    let _ = writeln!(s, "     '-' using 1:2 with points pt 7 title 'single-user minima'");
    let _ = writeln!(s, "1 {eps_min2}");
    let _ = writeln!(s, "{eps_min1} 1");
    let _ = writeln!(s, "e");
    s
}

/// Sampled region points with the segment between two MSE triples.
pub fn region_script(csv: &Path, a: &[f64], b: &[f64]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# set terminal pngcairo size 800,800; set output 'region.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'eps_1'");
    let _ = writeln!(s, "set ylabel 'eps_2'");
    let _ = writeln!(s, "set zlabel 'eps_3'");
    let _ = writeln!(s, "set view 60, 30");
    let _ = writeln!(
        s,
        "splot '{}' skip 1 using 4:5:6 with dots title 'sampled region', \\",
        csv.display()
    );
    let _ = writeln!(s, "      '-' using 1:2:3 with linespoints lw 2 pt 7 title 'segment'");
    let _ = writeln!(s, "{} {} {}", a[0], a[1], a[2]);
    let _ = writeln!(s, "{} {} {}", b[0], b[1], b[2]);
    let _ = writeln!(s, "e");
    s
}

fn main() {
    let bounds = ordcone::RunBounds::default();
    let t0 = std::time::Instant::now();
    let records = ordcone::verify::run_all(&bounds, 0, None).unwrap();
    for r in &records {
        println!("{:?}  {}  ({}ms)", r.status, r.claim, t0.elapsed().as_millis());
    }
}

// Counter-based streams: any (seed, stream, counter) can be reopened directly.
use langevin_mlmc::rng::{stream_id, tag, RngStream};

fn main() {
    let mut a = RngStream::keyed(42, &[tag::PATH, 7]);
    for _ in 0..5 {
        a.normal();
    }
    let c = a.counter();
    let next = a.normal();
    let mut b = RngStream::at(42, stream_id(&[tag::PATH, 7]), c);
    println!("counter {c}: {next} == {}", b.normal());
    println!("child streams: {:.6} {:.6}", a.child(0).normal(), a.child(1).normal());
}

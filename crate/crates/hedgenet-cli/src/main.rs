fn main() {
    println!("hedgenet");
}

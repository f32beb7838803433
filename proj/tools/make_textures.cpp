// Regenerates the synthetic scenes shipped under data/. Usage:
//   make_textures <output-dir>

#include <filesystem>
#include <iostream>

#include "asds/pgm_io.hpp"
#include "texture_gen.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_textures <output-dir>\n";
        return 2;
    }
    std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);

    asds::save_pgm(synth_texture(256, 256, 11), (dir / "texture_train_a.pgm").string());
    asds::save_pgm(synth_texture(256, 256, 22), (dir / "texture_train_b.pgm").string());
    asds::save_pgm(synth_texture(256, 256, 33), (dir / "texture_train_c.pgm").string());
    // Held-out scenes: 128x128 for deblurring, 126x126 (divisible by 3) for
    // the 3x super-resolution path.
    asds::save_pgm(synth_texture(128, 128, 77), (dir / "texture_test_128.pgm").string());
    asds::save_pgm(synth_texture(126, 126, 77), (dir / "texture_test_126.pgm").string());
    std::cout << "wrote 5 images to " << dir << "\n";
    return 0;
}

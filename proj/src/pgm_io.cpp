#include "asds/pgm_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace asds {

// Skips whitespace and '#' comment lines, then reads one decimal token.
static int read_header_int(std::istream& in, const std::string& path) {
    while (true) {
        int c = in.peek();
        if (c == EOF)
            throw std::invalid_argument("malformed PGM header: " + path);
        if (std::isspace(c)) {
            in.get();
        } else if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            break;
        }
    }
    int value;
    if (!(in >> value))
        throw std::invalid_argument("malformed PGM header: " + path);
    return value;
}

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw std::invalid_argument("not a binary PGM (P5) file: " + path);
    int w = read_header_int(in, path);
    int h = read_header_int(in, path);
    int maxval = read_header_int(in, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw std::invalid_argument("unsupported PGM header (need 8-bit): " + path);
    in.get(); // single whitespace byte before the payload

    std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in)
        throw std::runtime_error("truncated PGM payload: " + path);

    Image img(w, h);
    for (size_t i = 0; i < raw.size(); ++i)
        img.data[i] = static_cast<double>(raw[i]);
    return img;
}

void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        double v = img.data[i];
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        raw[i] = static_cast<unsigned char>(std::lround(v));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace asds

#include "auvplan/field_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "auvplan/error.hpp"
#include "auvplan/hash.hpp"
#include "auvplan/text_util.hpp"

namespace auvplan {
namespace {

struct Line {
  int number = 0;
  std::vector<std::string_view> tokens;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) {
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      storage_.push_back(raw);
      numbers_.push_back(number);
    }
    for (std::size_t i = 0; i < storage_.size(); ++i) {
      auto tokens = text::split_ws(storage_[i]);
      if (!tokens.empty()) lines_.push_back({numbers_[i], std::move(tokens)});
    }
  }

  bool done() const { return pos_ >= lines_.size(); }
  const Line* peek() const { return done() ? nullptr : &lines_[pos_]; }
  const Line& next(std::string_view expecting) {
    if (done()) throw ParseError("unexpected end of field document, expected " + std::string(expecting));
    return lines_[pos_++];
  }

 private:
  std::vector<std::string> storage_;  // std::string_view tokens point in here
  std::vector<int> numbers_;
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw ParseError("line " + std::to_string(line.number) + ": " + what);
}

bool is_keyword(std::string_view t) {
  return t == "layer" || t == "u" || t == "v" || t == "land";
}

int parse_int(const Line& line, std::string_view token, const char* what) {
  const auto value = text::parse_number<int>(token);
  if (!value) fail(line, std::string("invalid integer for ") + what + ": '" + std::string(token) + "'");
  return *value;
}

double parse_real(const Line& line, std::string_view token, const char* what) {
  const auto value = text::parse_number<double>(token);
  if (!value) fail(line, std::string("invalid number for ") + what + ": '" + std::string(token) + "'");
  return *value;
}

void expect_keyword(LineReader& reader, std::string_view keyword) {
  const Line& line = reader.next(keyword);
  if (line.tokens.size() != 1 || line.tokens[0] != keyword)
    fail(line, "expected '" + std::string(keyword) + "'");
}

template <typename Sink>
void read_block(LineReader& reader, const GridGeometry& g, int layer, std::string_view name,
                Sink&& sink) {
  for (int iy = 0; iy < g.ny; ++iy) {
    const Line* peek = reader.peek();
    if (peek == nullptr || is_keyword(peek->tokens[0])) {
      throw ParseError("dimension mismatch: layer " + std::to_string(layer) + " " +
                       std::string(name) + " has " + std::to_string(iy) + " rows, expected " +
                       std::to_string(g.ny));
    }
    const Line& line = reader.next("row");
    if (static_cast<int>(line.tokens.size()) != g.nx) {
      fail(line, "dimension mismatch: layer " + std::to_string(layer) + " " + std::string(name) +
                     " row " + std::to_string(iy) + " has " + std::to_string(line.tokens.size()) +
                     " values, expected " + std::to_string(g.nx));
    }
    for (int ix = 0; ix < g.nx; ++ix) sink(line, line.tokens[static_cast<std::size_t>(ix)]);
  }
}

}  // namespace

FlowField load_flow_field(std::istream& in) {
  LineReader reader(in);

  const Line& version = reader.next("format_version");
  if (version.tokens.size() != 2 || version.tokens[0] != "format_version")
    fail(version, "document must start with 'format_version <n>'");
  if (parse_int(version, version.tokens[1], "format_version") != kFieldFormatVersion)
    fail(version, "unsupported format_version " + std::string(version.tokens[1]));

  GridGeometry g;
  bool have_nx = false, have_ny = false, have_size = false, have_depths = false;
  while (!reader.done() && reader.peek()->tokens[0] != "layer") {
    const Line& line = reader.next("header");
    const auto key = line.tokens[0];
    const auto nargs = line.tokens.size() - 1;
    auto once = [&](bool& seen) {
      if (seen) fail(line, "duplicate key '" + std::string(key) + "'");
      seen = true;
    };
    if (key == "nx" && nargs == 1) {
      once(have_nx);
      g.nx = parse_int(line, line.tokens[1], "nx");
    } else if (key == "ny" && nargs == 1) {
      once(have_ny);
      g.ny = parse_int(line, line.tokens[1], "ny");
    } else if (key == "cell_size_m" && nargs == 1) {
      once(have_size);
      g.cell_size = parse_real(line, line.tokens[1], "cell_size_m");
    } else if (key == "layer_depths_m" && nargs >= 1) {
      once(have_depths);
      for (std::size_t i = 1; i < line.tokens.size(); ++i)
        g.layer_depths.push_back(parse_real(line, line.tokens[i], "layer_depths_m"));
    } else if (key == "origin_deg" && nargs == 2) {
      if (g.origin) fail(line, "duplicate key 'origin_deg'");
      g.origin = GeoOrigin{parse_real(line, line.tokens[1], "origin longitude"),
                           parse_real(line, line.tokens[2], "origin latitude")};
    } else {
      fail(line, "unrecognized header line '" + std::string(key) + "'");
    }
  }
  if (!have_nx || !have_ny || !have_size || !have_depths)
    throw ParseError("field header must define nx, ny, cell_size_m and layer_depths_m");
  g.validate();

  const std::size_t n = g.cell_count();
  std::vector<double> u, v;
  std::vector<std::uint8_t> land;
  u.reserve(n);
  v.reserve(n);
  land.reserve(n);

  for (int l = 0; l < g.num_layers(); ++l) {
    const Line& header = reader.next("layer " + std::to_string(l));
    if (header.tokens.size() != 2 || header.tokens[0] != "layer" ||
        parse_int(header, header.tokens[1], "layer") != l)
      fail(header, "expected 'layer " + std::to_string(l) + "'");

    expect_keyword(reader, "u");
    read_block(reader, g, l, "u", [&](const Line& line, std::string_view t) {
      u.push_back(parse_real(line, t, "u"));
    });
    expect_keyword(reader, "v");
    read_block(reader, g, l, "v", [&](const Line& line, std::string_view t) {
      v.push_back(parse_real(line, t, "v"));
    });
    expect_keyword(reader, "land");
    read_block(reader, g, l, "land", [&](const Line& line, std::string_view t) {
      if (t == "0") land.push_back(0);
      else if (t == "1") land.push_back(1);
      else fail(line, "land values must be 0 or 1, got '" + std::string(t) + "'");
    });
  }
  if (!reader.done()) {
    const Line& extra = reader.next("end");
    if (extra.tokens[0] == "layer")
      fail(extra, "dimension mismatch: more layers than layer_depths_m declares");
    fail(extra, "unexpected content after the last layer");
  }

  return FlowField(std::move(g), std::move(u), std::move(v), std::move(land));
}

FlowField load_flow_field_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field file " + path.string());
  return load_flow_field(in);
}

void write_flow_field(std::ostream& out, const FlowField& field) {
  const GridGeometry& g = field.geometry();
  out << "# layered current field: u east, v north (m/s); rows run south to north; land 1 = "
         "inaccessible\n";
  out << "format_version " << kFieldFormatVersion << "\n";
  out << "nx " << g.nx << "\n";
  out << "ny " << g.ny << "\n";
  out << "cell_size_m " << text::format_double(g.cell_size) << "\n";
  out << "layer_depths_m";
  for (double d : g.layer_depths) out << ' ' << text::format_double(d);
  out << "\n";
  if (g.origin) {
    out << "origin_deg " << text::format_double(g.origin->longitude_deg) << ' '
        << text::format_double(g.origin->latitude_deg) << "\n";
  }

  auto block = [&](int l, const char* name, auto&& value_at) {
    out << name << "\n";
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        if (ix) out << ' ';
        out << value_at(field.flat_index({ix, iy, l}));
      }
      out << "\n";
    }
  };
  for (int l = 0; l < g.num_layers(); ++l) {
    out << "layer " << l << "\n";
    block(l, "u", [&](std::size_t i) { return text::format_double(field.u()[i]); });
    block(l, "v", [&](std::size_t i) { return text::format_double(field.v()[i]); });
    block(l, "land", [&](std::size_t i) { return field.land()[i] ? '1' : '0'; });
  }
}

void write_flow_field_file(const std::filesystem::path& path, const FlowField& field) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write field file " + path.string());
  write_flow_field(out, field);
}

std::string field_fingerprint(const FlowField& field) {
  std::ostringstream os;
  write_flow_field(os, field);
  return to_hex(fnv1a64(os.str()));
}

}  // namespace auvplan

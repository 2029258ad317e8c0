#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include "pvgp/csv.hpp"
#include "pvgp/error.hpp"
#include "pvgp/kernels.hpp"

namespace pvgp {

namespace {

std::string radial_token(KernelFamily family, MaternNu nu) {
  switch (family) {
    case KernelFamily::SquaredExponential: return "se";
    case KernelFamily::RationalQuadratic: return "rq";
    case KernelFamily::Matern:
      switch (nu) {
        case MaternNu::Half: return "matern12";
        case MaternNu::ThreeHalves: return "matern32";
        case MaternNu::FiveHalves: return "matern52";
      }
      break;
    default: break;
  }
  throw DataError("no radial token for family " + family_name(family));
}

std::string lambda_list(const std::vector<double>& values) {
  std::string out = "lambda=[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out + "]";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  KernelSpec parse() {
    KernelSpec spec;
    const std::string head = identifier();
    if (head == "whitenoise") {
      spec.family = KernelFamily::WhiteNoise;
      spec.lengthscales.clear();
      expect('(');
      if (!peek(')')) spec.noise_variance = sigma2_assignment();
      expect(')');
    } else if (head == "periodic") {
      spec.family = KernelFamily::Periodic;
      expect('(');
      set_radial(spec, identifier(), /*as_base=*/true);
      expect(';');
      arguments(spec);
      expect(')');
      require_periodic_fields();
    } else {
      set_radial(spec, head, /*as_base=*/false);
      expect('(');
      arguments(spec);
      expect(')');
    }
    if (!at_end()) {
      expect('+');
      if (identifier() != "whitenoise")
        fail("only a whitenoise term may be added to the main kernel");
      expect('(');
      spec.noise_variance = sigma2_assignment();
      expect(')');
    }
    skip_ws();
    if (!at_end()) fail("trailing characters");
    spec.validate();
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("kernel spec parse error at offset " +
                    std::to_string(pos_) + ": " + what + " in '" +
                    std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (std::isalnum(c) || c == '_') {
        ++pos_;
      } else if (c >= 0x80) {
        // UTF-8 continuation (sigma / superscript two)
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first < last && *first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  double sigma2_assignment() {
    const std::string key = identifier();
    if (key != "sigma2" && key != "\xcf\x83\xc2\xb2")
      fail("expected sigma2=");
    expect('=');
    return number();
  }

  void set_radial(KernelSpec& spec, const std::string& token, bool as_base) {
    KernelFamily family;
    if (token == "se") {
      family = KernelFamily::SquaredExponential;
    } else if (token == "rq") {
      family = KernelFamily::RationalQuadratic;
    } else if (token == "matern12") {
      family = KernelFamily::Matern;
      spec.nu = MaternNu::Half;
    } else if (token == "matern32") {
      family = KernelFamily::Matern;
      spec.nu = MaternNu::ThreeHalves;
    } else if (token == "matern52") {
      family = KernelFamily::Matern;
      spec.nu = MaternNu::FiveHalves;
    } else {
      fail("unknown kernel '" + token + "'");
    }
    if (as_base) {
      spec.base_family = family;
    } else {
      spec.family = family;
    }
    radial_ = family;
  }

  void arguments(KernelSpec& spec) {
    bool first = true;
    while (!peek(')')) {
      if (!first) expect(',');
      first = false;
      const std::string key = identifier();
      expect('=');
      if (key == "h") {
        spec.amplitude = number();
        seen_h_ = true;
      } else if (key == "w") {
        spec.roughness = number();
        seen_w_ = true;
      } else if (key == "T") {
        spec.period = number();
        seen_t_ = true;
      } else if (key == "alpha" || key == "\xce\xb1") {
        spec.alpha = number();
        seen_alpha_ = true;
      } else if (key == "lambda" || key == "\xce\xbb") {
        spec.lengthscales.clear();
        expect('[');
        while (!peek(']')) {
          if (!spec.lengthscales.empty()) expect(',');
          spec.lengthscales.push_back(number());
        }
        expect(']');
      } else {
        fail("unknown parameter '" + key + "'");
      }
    }
    if (!seen_h_) fail("missing h=");
    if (radial_ == KernelFamily::RationalQuadratic && !seen_alpha_)
      fail("rq kernel requires alpha=");
    if (radial_ != KernelFamily::RationalQuadratic && seen_alpha_)
      fail("alpha= is only valid for rq kernels");
  }

  void require_periodic_fields() {
    if (!seen_w_) fail("periodic kernel requires w=");
    if (!seen_t_) fail("periodic kernel requires T=");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  KernelFamily radial_ = KernelFamily::SquaredExponential;
  bool seen_h_ = false;
  bool seen_w_ = false;
  bool seen_t_ = false;
  bool seen_alpha_ = false;
};

}  // namespace

std::string to_string(const KernelSpec& spec) {
  std::string noise = "whitenoise(sigma2=" + format_double(spec.noise_variance) + ")";
  if (spec.family == KernelFamily::WhiteNoise) return noise;

  const std::string radial = radial_token(spec.radial_family(), spec.nu);
  std::string out;
  if (spec.family == KernelFamily::Periodic) {
    out = "periodic(" + radial + "; h=" + format_double(spec.amplitude) +
          ", w=" + format_double(spec.roughness) +
          ", T=" + format_double(spec.period);
    if (!spec.lengthscales.empty()) out += ", " + lambda_list(spec.lengthscales);
  } else {
    out = radial + "(h=" + format_double(spec.amplitude) + ", " +
          lambda_list(spec.lengthscales);
  }
  if (spec.radial_family() == KernelFamily::RationalQuadratic)
    out += ", alpha=" + format_double(spec.alpha);
  out += ")";
  return out + " + " + noise;
}

KernelSpec parse_kernel_spec(const std::string& text) {
  return Parser(text).parse();
}

}  // namespace pvgp

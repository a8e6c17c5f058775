#include "itershim/ncalg.hpp"

namespace itershim::ncalg {

nlohmann::ordered_json to_json(const Series& s) {
  nlohmann::ordered_json j;
  j["alphabet"] = s.alphabet()->letters();
  j["depth"] = s.depth();
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < s.size(); ++i)
    coeffs[s.word_string(s.word_at(i))] = {s[i].real(), s[i].imag()};
  j["coefficients"] = std::move(coeffs);
  return j;
}

Series series_from_json(const nlohmann::ordered_json& j) {
  auto alphabet = make_alphabet(j.at("alphabet").get<std::vector<std::string>>());
  Series s(alphabet, j.at("depth").get<int>());
  for (const auto& [key, value] : j.at("coefficients").items()) {
    Word w;
    std::size_t start = 0;
    while (start < key.size()) {
      auto sp = key.find(' ', start);
      if (sp == std::string::npos) sp = key.size();
      w.push_back(alphabet->index_of(key.substr(start, sp - start)));
      start = sp + 1;
    }
    s.at(w) = Complex(value.at(0).get<double>(), value.at(1).get<double>());
  }
  return s;
}

}  // namespace itershim::ncalg

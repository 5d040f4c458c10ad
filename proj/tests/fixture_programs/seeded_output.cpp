// Writes --bytes bytes of a seeded mt19937_64 stream to stdout and the
// SHA-256 of those bytes (hex) to stderr.
#include <openssl/evp.h>

#include <cstdio>
#include <iostream>
#include <memory>
#include <random>

#include "optionhost/fixture_specs.hpp"

int main(int argc, char** argv) {
  using namespace optionhost;
  std::vector<std::string> args(argv + 1, argv + argc);
  argdoc::ParsedArgs parsed;
  try {
    parsed = argdoc::parse_argv(fixtures::seeded_output(), args);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n'
              << argdoc::emit(fixtures::seeded_output(),
                              argdoc::EmitFormat::ShortHelp);
    return 2;
  }
  auto seed = static_cast<std::uint64_t>(std::get<std::int64_t>(parsed.get("seed")));
  auto remaining = static_cast<std::uint64_t>(std::get<std::int64_t>(parsed.get("bytes")));

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::mt19937_64 gen(seed);
  std::vector<unsigned char> buf;
  while (remaining > 0) {
    std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, 65536));
    buf.resize(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = static_cast<unsigned char>(gen());
    EVP_DigestUpdate(ctx.get(), buf.data(), n);
    std::fwrite(buf.data(), 1, n, stdout);
    remaining -= n;
  }
  std::fflush(stdout);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  for (unsigned int i = 0; i < len; ++i) std::fprintf(stderr, "%02x", md[i]);
  std::fprintf(stderr, "\n");
  return 0;
}

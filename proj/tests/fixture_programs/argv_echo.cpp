// Prints each argument (argv[1..]) on its own line, verbatim.
#include <cstdio>
#include <cstring>

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::fwrite(argv[i], 1, std::strlen(argv[i]), stdout);
    std::fputc('\n', stdout);
  }
  return 0;
}

#pragma once

namespace sdkg {
int cli_main(int argc, char** argv);
}

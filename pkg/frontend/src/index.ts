/** Browser entry point. Kept free of logic so tests can drive boot() directly. */

import { boot } from "./main.js";

void boot();

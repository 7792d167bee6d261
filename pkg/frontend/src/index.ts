export * from "./geometry.js";
export * from "./viewstate.js";
export * from "./client.js";

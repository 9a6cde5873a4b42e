import { mount } from "./app.js";

const endpoint =
  new URLSearchParams(window.location.search).get("ws") ??
  `ws://${window.location.host}/ws`;

mount(document, endpoint);

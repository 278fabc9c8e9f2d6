import { mount } from "./ui";

const root = document.getElementById("app");
if (root) {
  mount(root);
}

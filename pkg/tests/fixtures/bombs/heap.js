var pile = [];
while (true) {
  pile.push("xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx");
}

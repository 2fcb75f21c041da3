def execute_command(image):
    image_patch = ImagePatch(image)
    candidate_patches = image_patch.find('chair')
    matching_patches = []
    for patch in candidate_patches:
        if patch.verify_property('chair', 'blue'):
            matching_patches.append(patch)
    if len(matching_patches) == 0:
        return {'function': 'None', 'error': 'No blue chair found.'}
    target = matching_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
